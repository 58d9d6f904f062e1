"""
Celery app for parameter sweeps. Settings run it eagerly in-process, so each
sweep point is a task executed by the calling thread.
"""
import os
from celery import Celery

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "tracyApp.settings")
app = Celery("tracy")
app.config_from_object("django.conf:settings", namespace="CELERY")
# only the command-line app defines sweep tasks
app.autodiscover_tasks(['console'])
