import logging
import sys

from forge.logger import STAT

logging.basicConfig(format="%(message)s", level=STAT, stream=sys.stdout)
