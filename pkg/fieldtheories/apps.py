from django.apps import AppConfig


class FieldtheoriesConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "fieldtheories"
    verbose_name = "0|1-dimensional field theories"
