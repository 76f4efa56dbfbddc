"""
Point d'entrée de l'application
python -m app.main <commande> [options]
"""

from app.cli import cli


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
