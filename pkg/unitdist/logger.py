import os
import logging
from logging.handlers import RotatingFileHandler


def setup_logging() -> None:
    global log_file
    global log

    log_file = os.environ.get("LOG_FILE", None)

    # grab everything, handlers below have their own levels
    log = logging.getLogger("unitdist")
    log.setLevel(logging.DEBUG)
    log.propagate = False

    if log_file:
        os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
        fh = RotatingFileHandler(
            log_file,
            maxBytes=int(0.3 * 1024 * 1024),
            backupCount=3,
        )
        fh.setFormatter(logging.Formatter("%(asctime)s %(levelname)-8s %(message)s"))
        fh.setLevel(os.getenv("LOG_LEVEL_FILE", logging.DEBUG))
        log.addHandler(fh)

    # console output goes to stderr, so csv on stdout stays clean
    sh = logging.StreamHandler()
    sh.setFormatter(
        logging.Formatter("%(levelname)-8s %(name)s %(funcName)s : %(message)s")
    )
    sh.setLevel(os.getenv("LOG_LEVEL", logging.INFO))
    log.addHandler(sh)

    log.debug("Logging initialized")


def set_console_level(level: str | int) -> None:
    for handler in log.handlers:
        if not isinstance(handler, RotatingFileHandler):
            handler.setLevel(level)


log: logging.Logger = None  # type: ignore[assignment]
log_file = None
setup_logging()
