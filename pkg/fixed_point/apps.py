from django.apps import AppConfig


class FixedPointConfig(AppConfig):
    name = "fixed_point"
