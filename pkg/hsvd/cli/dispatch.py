import logging
import sys

import click

from hsvd import create_app
from hsvd.config import Config
from hsvd.errors import HsvdError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


def cli_dispatch(argv=None, config_class=Config) -> int:
    """Run the CLI on ``argv`` and return its exit code instead of exiting."""
    app = create_app(config_class)
    args = sys.argv[1:] if argv is None else list(argv)
    try:
        result = app.main(args=args, prog_name='hsvd', standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_RUNTIME
    except HsvdError as e:
        logger.debug("command failed", exc_info=True)
        click.echo(f"Error: {e}", err=True)
        return EXIT_RUNTIME
    return result if isinstance(result, int) else EXIT_OK


def main():
    sys.exit(cli_dispatch())
