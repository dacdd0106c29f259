# Copyright (c) 2025, Ahmad Hussnain and contributors
# For license information, please see license.txt

import configparser
import os
from dataclasses import dataclass, fields

import needstack
from needstack import _
from needstack.exceptions import ConfigError, ValidationError

ENV_VAR = "NEEDSTACK_CONFIG"
_SECTION = "needstack"
_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")

logger = needstack.logger(__name__)


@dataclass
class PipelineConfig:
    # embeddings
    dim: int = 100
    window: int = 5
    negative: int = 5
    epochs: int = 5
    min_count: int = 5
    subsample: float = 1e-4
    lr: float = 0.025
    seed: int = 1
    workers: int = 1
    batch_words: int = 256
    # phrases
    threshold: float = 0.8
    min_pair_count: int = 5
    max_passes: int = 3
    # corpus
    on_error: str = "skip"
    # wnw
    scheme: str = "ud"
    strict_pos: bool = False
    lemma_trigger: bool = False
    # topneeds
    seeds: tuple = ("needs", "supplies")
    k: int = 100
    merge: str = "max"
    exclude_need_forms: bool = False
    # evaluation
    cutoff: int = 250
    baseline_aggregate: str = "mean"
    baseline_merge: str = "max"
    ks: tuple = tuple(range(10, 101, 10))

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    def update(self, values, source=None):
        """
            Set keys from raw strings or already typed values.
            Args:
                values (dict): key -> value; keys may use `-` or `_`.
                source (str): Where the values came from, for error messages.
        """
        known = {f.name: f for f in fields(self)}
        for raw_key, value in values.items():
            key = raw_key.strip().replace("-", "_")
            if key not in known:
                needstack.throw(_("Unknown configuration key {0!r}").format(raw_key), ConfigError, path=source)
            if value is None:
                continue
            setattr(self, key, _convert(key, known[key].default, value, source))
        return self

    def validate(self):
        """Check every value before any work starts; ValidationErrors surface as ConfigError."""
        from needstack.needstack.corpus.corpus import ON_ERROR_POLICIES
        from needstack.needstack.evaluation.evaluation import AGGREGATES, MERGES
        from needstack.needstack.topneeds.topneeds import MERGE_MODES
        from needstack.needstack.wnw.wnw_helpers import SCHEMES

        try:
            self.train_config().validate()
            self.phrase_config().validate()
        except ValidationError as e:
            raise ConfigError(e.message) from e
        choices = (
            ("on_error", ON_ERROR_POLICIES),
            ("scheme", tuple(SCHEMES)),
            ("merge", MERGE_MODES),
            ("baseline_aggregate", AGGREGATES),
            ("baseline_merge", MERGES),
        )
        for key, allowed in choices:
            if getattr(self, key) not in allowed:
                needstack.throw(_("{0} must be one of {1}, got {2!r}").format(key, ", ".join(allowed), getattr(self, key)),
                                ConfigError)
        if not self.seeds or not all(self.seeds):
            needstack.throw(_("seeds must name at least one term"), ConfigError)
        if self.k < 0 or self.cutoff < 0:
            needstack.throw(_("k and cutoff must be >= 0"), ConfigError)
        if not self.ks or min(self.ks) < 1:
            needstack.throw(_("ks must be a non-empty list of cutoffs >= 1"), ConfigError)
        return self

    def train_config(self):
        from needstack.needstack.embeddings.embeddings import TrainConfig

        return TrainConfig(
            dim=self.dim, window=self.window, negative=self.negative, epochs=self.epochs,
            min_count=self.min_count, subsample=self.subsample, initial_lr=self.lr, seed=self.seed,
            workers=self.workers, batch_words=self.batch_words,
        )

    def phrase_config(self):
        from needstack.needstack.phrases.phrases import PhraseConfig

        return PhraseConfig(threshold=self.threshold, min_pair_count=self.min_pair_count, max_passes=self.max_passes)


def _convert(key, default, value, source):
    if not isinstance(value, str):
        if isinstance(default, tuple):
            return tuple(value)
        return value
    text = value.strip()
    try:
        if isinstance(default, bool):
            if text.lower() in _TRUE:
                return True
            if text.lower() in _FALSE:
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            items = [item for item in text.replace(",", " ").split() if item]
            return tuple(int(item) for item in items) if isinstance(default[0], int) else tuple(items)
    except ValueError:
        needstack.throw(_("Invalid value for {0}: {1!r}").format(key, value), ConfigError, path=source)
    return text


def read_config_file(path):
    """
        Read a flat `key = value` file; `#` and `;` start comments.
        Returns:
            dict: raw key -> string value.
    """
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as f:
            parser.read_string("[{0}]\n{1}".format(_SECTION, f.read()), source=path)
    except OSError as e:
        needstack.throw(_("Cannot read config file: {0}").format(e.strerror), ConfigError, path=path)
    except configparser.Error as e:
        needstack.throw(_("Malformed config file: {0}").format(e.message.splitlines()[0]), ConfigError, path=path)
    return dict(parser.items(_SECTION))


def load_config(path=None, overrides=None, environ=None):
    """
        Resolve the configuration: defaults, then the file named by NEEDSTACK_CONFIG,
        then `path`, then `overrides` (command-line flags; None values are ignored).
        Returns:
            PipelineConfig: validated.
    """
    environ = os.environ if environ is None else environ
    config = PipelineConfig()
    for source in (environ.get(ENV_VAR), path):
        if source:
            config.update(read_config_file(source), source=source)
            logger.debug("configuration read from %s", source)
    config.update(overrides or {})
    return config.validate()
