"""
Commande - Version
"""

from app.cli.dependencies import console
from app.core.config import settings


def version_command():
    """Affiche le nom et la version de l'application"""
    console.print(f"{settings.APP_NAME} {settings.APP_VERSION}")
