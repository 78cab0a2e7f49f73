import logging

from django.apps import AppConfig

logger = logging.getLogger(__name__)


class GeomoptConfig(AppConfig):
    name = 'geomopt'
    verbose_name = 'Quantum geometry optimization'

    def ready(self):
        from django.conf import settings
        logger.debug(f"geomopt ready, dense cap {settings.GEOMOPT['DENSE_CAP']}")
