from django.apps import AppConfig


class ChangepointConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'changepoint'
    verbose_name = 'Change-Point Testing'
