import logging

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def init_logging(level='INFO'):
    # Configure logging
    logging.basicConfig(format=LOG_FORMAT, level=getattr(logging, str(level).upper(), logging.INFO))
    logging.getLogger('hsvd').setLevel(getattr(logging, str(level).upper(), logging.INFO))
