import logging
from dataclasses import dataclass

import click

from hsvd.config import Config


@dataclass
class AppState:
    config: type
    precise: bool = False

    def fmt(self, value) -> str:
        return f"{value:.17g}" if self.precise else f"{value:.6g}"

    def fmt_list(self, values) -> str:
        return ', '.join(self.fmt(float(v)) for v in values)


def build_group(config_class=Config):
    @click.group(help="Truncated SVD of dense low-rank matrices by hierarchical merge-and-truncate.")
    @click.option('--precise', is_flag=True, help="Print numbers with 17 significant digits.")
    @click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
                  default=None, help="Override HSVD_LOG_LEVEL.")
    @click.pass_context
    def cli(ctx, precise, log_level):
        ctx.obj = AppState(config=config_class, precise=precise)
        if log_level:
            logging.getLogger('hsvd').setLevel(log_level.upper())

    from hsvd.cli import commands
    for command in commands.COMMANDS:
        cli.add_command(command)
    return cli
