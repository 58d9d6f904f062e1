import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tracyApp.settings')
django.setup()
