# Loaded with Django so the sweep tasks in console.tasks bind to this app.
from .celery import app as celery_app

__all__ = ['celery_app']
