"""
Single entry point: python -m vqar
"""

from vqar.ports.cli import cli


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
