from hsvd.config import Config
from hsvd.extensions import init_logging

__version__ = '0.1.0'


def create_app(config_class=Config):
    # create and configure the command-line app
    init_logging(config_class.LOG_LEVEL)

    from hsvd.cli import build_group
    return build_group(config_class)
