from django.apps import AppConfig


class PartitioningConfig(AppConfig):
    name = "partitioning"
