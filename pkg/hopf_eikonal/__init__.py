import logging
import os

from flask import Config

logger = logging.getLogger(__name__)

config = Config(os.path.dirname(os.path.abspath(__file__)))
config.from_pyfile("default_config.cfg")

if "TESTING" in os.environ:
    config.from_envvar("TESTING")
    logger.info("Using config for TESTING")
elif "DEVELOPMENT" in os.environ:
    config.from_envvar("DEVELOPMENT")
    logger.info("Using config for DEVELOPMENT")

if "HOPF_EIKONAL_CONFIG" in os.environ:
    config.from_envvar("HOPF_EIKONAL_CONFIG")
    logger.info("Using config from %s", os.environ["HOPF_EIKONAL_CONFIG"])

logger.setLevel(config["LOG_LEVEL"])

# Built-in control fields for residual diagnostics (see calculus.control_field)
CONTROL_FIELDS = ("x+2iy", "x+iy", "const", "planar-exp")

SAMPLING_REGIONS = ("toroidal", "box")

LINK_METHODS = ("exact", "midpoint")

EXPORT_FORMATS = ("csv", "obj")

# Process exit codes of the command line front end
EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_TOLERANCE = 3
EXIT_TRACE = 4
EXIT_LINKING = 5
