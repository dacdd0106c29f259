__version__ = "1.0.0"

import contextlib
import gettext
import logging
import os
import sys

_translation = gettext.translation(
    "needstack", localedir=os.path.join(os.path.dirname(__file__), "locale"), fallback=True
)


def _(msg):
    """Translate a user-facing message."""
    return _translation.gettext(msg)


def throw(msg, exc=None, **kwargs):
    """
    Raise `exc` (default: ValidationError) with the given message.
    Args:
        msg (str): The already translated message.
        exc (type): A subclass of NeedstackError.
        **kwargs: Extra attributes passed to the exception (e.g. path, line_no).
    """
    from needstack.exceptions import ValidationError

    raise (exc or ValidationError)(msg, **kwargs)


def logger(module=None):
    """
    Return a logger under the `needstack` namespace.
    Args:
        module (str): Dotted module name; `__name__` of the caller usually.
    Returns:
        logging.Logger
    """
    if not module or module == "needstack":
        return logging.getLogger("needstack")
    if module.startswith("needstack."):
        return logging.getLogger(module)
    return logging.getLogger("needstack." + module)


def setup_logging(verbosity=0, stream=None):
    """Attach one stderr handler to the `needstack` logger. Safe to call twice."""
    log = logger()
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    log.setLevel(level)
    for handler in list(log.handlers):
        if getattr(handler, "_needstack", False):
            log.removeHandler(handler)
    handler = logging.StreamHandler(stream)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
    handler._needstack = True
    log.addHandler(handler)
    log.propagate = False
    return log


@contextlib.contextmanager
def open_output(out=None):
    """
    Yield a text stream for `out`: stdout for None or "-", the object itself when it
    already has `write`, else a UTF-8 file opened at that path.
    """
    if out is None or out == "-":
        yield sys.stdout
    elif hasattr(out, "write"):
        yield out
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            yield f


def reset_logging():
    """Detach the handler installed by setup_logging."""
    log = logger()
    for handler in list(log.handlers):
        if getattr(handler, "_needstack", False):
            log.removeHandler(handler)
    log.propagate = True
