from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from ...serializers import FormSerializer, SimplicialSetSerializer
from ...services.simplicial_service import validate
from ...utils import (
    EXIT_FAILED_CHECK,
    CheckFailed,
    load_json,
    prepare_exception_handler,
    prepare_report,
    render_report,
    render_table,
)


def add_shared_flags(parser):
    parser.add_argument("--json", action="store_true", help="Emit the report as JSON")
    parser.add_argument("--seed", type=int, default=0, help="Seed for randomized parts (default 0)")


def load_space(path, param_name="--space", check=True):
    serializer = SimplicialSetSerializer(data=load_json(path, param_name))
    serializer.is_valid(raise_exception=True)
    space = serializer.save()
    if check:
        report = validate(space)
        if not report["valid"]:
            raise ValidationError({param_name: report["violations"]})
    return space


def load_form(path, space, param_name="--form"):
    serializer = FormSerializer(data=load_json(path, param_name), context={"space": space})
    serializer.is_valid(raise_exception=True)
    return serializer.save()


class ReportCommand(BaseCommand):
    """A command whose actions return report data; failures become exit codes.

    Subclasses declare actions in ``add_actions`` and implement
    ``handle_<action>(options)`` returning ``(data, message)``, raising
    ``CheckFailed`` when a check answers no.
    """

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest="action", required=True)
        self.add_actions(subparsers)

    def add_actions(self, subparsers):
        raise NotImplementedError

    def add_action(self, subparsers, name, help_text):
        action = subparsers.add_parser(
            name,
            help=help_text,
            called_from_command_line=getattr(self, "_called_from_command_line", None),
        )
        add_shared_flags(action)
        return action

    def handle(self, *args, **options):
        handler = getattr(self, f"handle_{options['action'].replace('-', '_')}")
        try:
            data, message = handler(options)
            envelope = prepare_report(data, message)
        except Exception as exc:
            returncode, envelope = prepare_exception_handler(exc)
            self.emit(envelope, options, error=returncode != EXIT_FAILED_CHECK)
            raise CommandError(envelope["message"], returncode=returncode)
        self.emit(envelope, options)

    def emit(self, envelope, options, error=False):
        text = render_report(envelope) if options.get("json") else render_table(envelope)
        if error and not options.get("json"):
            self.stderr.write(text)
        else:
            self.stdout.write(text)


class SingleReportCommand(ReportCommand):
    """A report command without actions."""

    def add_arguments(self, parser):
        add_shared_flags(parser)
        self.add_options(parser)

    def add_options(self, parser):
        pass

    def handle(self, *args, **options):
        options["action"] = "report"
        super().handle(*args, **options)


__all__ = ["CheckFailed", "ReportCommand", "SingleReportCommand", "load_form", "load_space"]
