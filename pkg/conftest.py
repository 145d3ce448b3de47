import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "superpoint.settings")
django.setup()
