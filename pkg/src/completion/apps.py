"""App configuration for the completion-time region module."""

from django.apps import AppConfig


class CompletionConfig(AppConfig):
    """Connect the completion app with Django's app registry."""
    name = 'completion'
    verbose_name = 'Completion time regions'
