# Copyright (c) 2025, Ahmad Hussnain and contributors
# For license information, please see license.txt

import contextlib
import itertools
import os
import sys
import tempfile
import time

import click

import needstack
from needstack import __version__, _, hooks
from needstack.config import PipelineConfig, load_config
from needstack.exceptions import InputFileError, NeedstackError
from needstack.needstack.corpus.corpus import ingest as ingest_tweets
from needstack.needstack.corpus.corpus import load_tweets, read_corpus, write_corpus
from needstack.needstack.embeddings.embeddings import EmbeddingModel, train_sgns
from needstack.needstack.evaluation.evaluation import (
    ResourceLexicon,
    baseline_rank,
    bundled_lexicons,
    cohens_kappa,
    coverage_prefix,
    load_gold,
    precision_at_k,
    precision_curve,
    prf1,
    write_curve,
)
from needstack.needstack.evaluation.evaluation_helpers import baseline_preprocess
from needstack.needstack.phrases.phrases import PhraseTable, annotate_corpus, mine_phrases
from needstack.needstack.topneeds.topneeds import PosLexicon, RankedResourceList, build_pos_lexicon, rank_top_needs
from needstack.needstack.topneeds.topneeds_helpers import READERS, read_tagged
from needstack.needstack.wnw.wnw import RULES, extract_triples, read_conllu, write_labels, write_triples

logger = needstack.logger(__name__)

TEXT_MODEL_EXTENSIONS = (".txt", ".vec")


class NeedstackGroup(click.Group):
    """Report NeedstackErrors and file system errors on stderr and exit with their code."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except NeedstackError as e:
            self.report(ctx, e)
        except OSError as e:
            self.report(ctx, InputFileError(e.strerror or str(e), path=e.filename))

    def report(self, ctx, error):
        click.echo(_("Error: {0}").format(error), err=True)
        ctx.exit(error.exit_code)


def config_options(*keys):
    """Add one flag per configuration key; unset flags leave the file or default value in place."""
    defaults = PipelineConfig()

    def decorator(f):
        for key in reversed(keys):
            default = getattr(defaults, key)
            flag = "--" + key.replace("_", "-")
            if isinstance(default, bool):
                f = click.option("{0}/--no-{1}".format(flag, flag[2:]), key, default=None,
                                 help=_("Default: {0}.").format("on" if default else "off"))(f)
            elif isinstance(default, tuple):
                f = click.option(flag, key, type=str, default=None,
                                 help=_("Comma-separated. Default: {0}.").format(",".join(map(str, default))))(f)
            else:
                f = click.option(flag, key, type=type(default), default=None,
                                 help=_("Default: {0}.").format(default))(f)
        return f

    return decorator


def get_config(ctx, options):
    keys = set(PipelineConfig.keys())
    return load_config(ctx.obj.get("config_path"), {k: v for k, v in options.items() if k in keys})


@contextlib.contextmanager
def timed(name, unit):
    """Write `<name>: <count> <unit> in <seconds>s` to stderr when the block finishes."""
    summary = {"count": 0}
    started = time.monotonic()
    yield summary
    click.echo(_("{0}: {1} {2} in {3:.2f}s").format(name, summary["count"], unit, time.monotonic() - started), err=True)


def load_model(path):
    if os.path.splitext(path)[1].lower() in TEXT_MODEL_EXTENSIONS:
        return EmbeddingModel.load_text(path)
    return EmbeddingModel.load(path)


# Stages shared by the single-step subcommands and `pipeline`


def run_ingest(config, in_path, out_path, baseline=False):
    with timed("ingest", "tweets") as summary:
        counts = ingest_tweets(in_path, out_path, on_error=config.on_error,
                               preprocess=baseline_preprocess if baseline else None)
        summary["count"] = counts["tweets"]
    return counts


def run_mine_phrases(config, corpus_path, out_path):
    with timed("mine-phrases", "phrases") as summary:
        table = mine_phrases(read_corpus(corpus_path), config.phrase_config())
        summary["count"] = table.dump(out_path)
    return table


def run_annotate(config, corpus_path, phrases_path, out_path):
    with timed("annotate", "sentences") as summary:
        table = PhraseTable.load(phrases_path)
        summary["count"] = write_corpus(annotate_corpus(read_corpus(corpus_path), table), out_path)
    return summary["count"]


def run_train(config, corpus_path, out_path, text_out=None):
    with timed("train", "words") as summary:
        model = train_sgns(read_corpus(corpus_path), config.train_config())
        model.save(out_path)
        if text_out:
            model.save_text(text_out)
        summary["count"] = int(sum(model.vocab.counts))
    return model


def run_top_needs(config, model_path, pos_lex_path, out):
    with timed("top-needs", "terms") as summary:
        lexicon = PosLexicon.load(pos_lex_path) if pos_lex_path else None
        ranked = rank_top_needs(load_model(model_path), lexicon, seeds=config.seeds, k=config.k,
                                merge=config.merge, exclude_need_forms=config.exclude_need_forms)
        ranked.write(out)
        summary["count"] = len(ranked)
    return ranked


@click.group(cls=NeedstackGroup)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help=_("Flat key = value configuration file; overrides $NEEDSTACK_CONFIG, flags override it."))
@click.option("-v", "--verbose", count=True, help=_("-v for progress, -vv for debug logging."))
@click.version_option(__version__, prog_name=hooks.app_name)
@click.pass_context
def cli(ctx, config_path, verbose):
    """Top-needs ranking and who-needs-what extraction for crisis tweets."""
    needstack.setup_logging(verbose)
    ctx.call_on_close(needstack.reset_logging)
    ctx.obj = {"config_path": config_path}


@click.command("ingest")
@click.option("--in", "in_path", required=True, help=_("JSON-lines tweet file."))
@click.option("--out", "out_path", required=True, help=_("Corpus file to write."))
@click.option("--baseline", is_flag=True, help=_("Stem and drop stopwords for the cosine baseline model."))
@config_options("on_error")
@click.pass_context
def ingest(ctx, in_path, out_path, baseline, **options):
    """Tokenize tweets into a corpus file."""
    run_ingest(get_config(ctx, options), in_path, out_path, baseline)


@click.command("mine-phrases")
@click.option("--corpus", "corpus_path", required=True)
@click.option("--out", "out_path", required=True, help=_("Phrase TSV to write."))
@config_options("threshold", "min_pair_count", "max_passes")
@click.pass_context
def mine(ctx, corpus_path, out_path, **options):
    """Mine salient phrases from a corpus file."""
    run_mine_phrases(get_config(ctx, options), corpus_path, out_path)


@click.command("annotate")
@click.option("--corpus", "corpus_path", required=True)
@click.option("--phrases", "phrases_path", required=True, help=_("Phrase TSV (ours or AutoPhrase output)."))
@click.option("--out", "out_path", required=True)
@click.pass_context
def annotate(ctx, corpus_path, phrases_path, out_path):
    """Join phrase occurrences into hyphenated tokens."""
    run_annotate(get_config(ctx, {}), corpus_path, phrases_path, out_path)


@click.command("train")
@click.option("--corpus", "corpus_path", required=True)
@click.option("--out", "out_path", required=True, help=_("Binary model file to write."))
@click.option("--text-out", default=None, help=_("Also write word2vec text vectors."))
@config_options("dim", "window", "negative", "epochs", "min_count", "subsample", "lr", "seed", "workers",
                "batch_words")
@click.pass_context
def train(ctx, corpus_path, out_path, text_out, **options):
    """Train skip-gram embeddings with negative sampling."""
    run_train(get_config(ctx, options), corpus_path, out_path, text_out)


@click.command("pos-lexicon")
@click.option("--tagged", "tagged_paths", multiple=True, required=True, help=_("Tagged input; repeatable."))
@click.option("--format", "fmt", type=click.Choice(sorted(READERS)), default=None,
              help=_("Input format; guessed from the extension by default."))
@click.option("--out", "out_path", required=True)
@click.pass_context
def pos_lexicon(ctx, tagged_paths, fmt, out_path):
    """Count POS tags per token for the noun filter."""
    get_config(ctx, {})
    with timed("pos-lexicon", "tokens") as summary:
        pairs = itertools.chain.from_iterable(read_tagged(path, fmt) for path in tagged_paths)
        summary["count"] = build_pos_lexicon(pairs).dump(out_path)


@click.command("top-needs")
@click.option("--model", "model_path", required=True, help=_("Binary model, or .txt/.vec text vectors."))
@click.option("--pos-lex", "pos_lex_path", default=None, help=_("POS lexicon; without it no noun filter."))
@click.option("--out", "out", default="-", help=_("Ranked TSV; standard output by default."))
@config_options("seeds", "k", "merge", "exclude_need_forms")
@click.pass_context
def top_needs(ctx, model_path, pos_lex_path, out, **options):
    """Rank the nouns closest to the seed terms."""
    run_top_needs(get_config(ctx, options), model_path, pos_lex_path, out)


@click.command("extract")
@click.option("--conllu", "conllu_path", required=True, help=_("Dependency-parsed sentences."))
@click.option("--out", "out", default="-", help=_("Triples TSV; standard output by default."))
@click.option("--labels-out", default=None, help=_("Also write sent_id<TAB>0|1 labels."))
@click.option("--rules", default=",".join(RULES), show_default=True)
@config_options("scheme", "strict_pos", "lemma_trigger")
@click.pass_context
def extract(ctx, conllu_path, out, labels_out, rules, **options):
    """Extract who-needs-what triples."""
    config = get_config(ctx, options)
    with timed("extract", "sentences") as summary:
        sentences = read_conllu(conllu_path)
        triples, labels = extract_triples(sentences, scheme=config.scheme, strict_pos=config.strict_pos,
                                          lemma_trigger=config.lemma_trigger,
                                          rules=tuple(r.strip() for r in rules.split(",") if r.strip()))
        write_triples(triples, out)
        if labels_out:
            write_labels(labels, labels_out)
        summary["count"] = len(sentences)


@click.command("baseline")
@click.option("--in", "in_path", required=True, help=_("JSON-lines tweet file."))
@click.option("--model", "model_path", required=True, help=_("Model trained on an `ingest --baseline` corpus."))
@click.option("--out", "out", default="-", help=_("Labels TSV; standard output by default."))
@config_options("cutoff", "baseline_aggregate", "baseline_merge", "on_error")
@click.pass_context
def baseline(ctx, in_path, model_path, out, **options):
    """Label the tweets closest to "need"/"require" as positive."""
    config = get_config(ctx, options)
    with timed("baseline", "tweets") as summary:
        labels = baseline_rank(load_tweets(in_path, on_error=config.on_error), load_model(model_path),
                               cutoff=config.cutoff, aggregate=config.baseline_aggregate,
                               merge=config.baseline_merge)
        write_labels(labels.items(), out)
        summary["count"] = len(labels)


@click.command("eval-topk")
@click.option("--ranked", "ranked_path", required=True, help=_("Ranked TSV from top-needs."))
@click.option("--lexicon", "lexicon_paths", multiple=True,
              help=_("Resource lexicon file; repeatable. Defaults to the bundled WHO and HHS lists."))
@click.option("--out", "out", default="-")
@click.option("--curve-out", default=None, help=_("Write k<TAB>lexicon<TAB>precision rows."))
@config_options("ks")
@click.pass_context
def eval_topk(ctx, ranked_path, lexicon_paths, out, curve_out, **options):
    """Precision@k of a ranked list against resource lexicons."""
    config = get_config(ctx, options)
    with timed("eval-topk", "terms") as summary:
        ranked = RankedResourceList.load(ranked_path)
        lexicons = [ResourceLexicon.load(path) for path in lexicon_paths] or bundled_lexicons()
        report = precision_at_k(ranked, lexicons, config.ks)
        report.counts["covered_prefix"] = coverage_prefix(ranked, lexicons)
        report.write(out)
        if curve_out:
            write_curve(precision_curve(ranked, lexicons, config.ks), curve_out)
        summary["count"] = len(ranked)


@click.command("eval-triples")
@click.option("--labels", "labels_path", required=True, help=_("Predicted sent_id<TAB>0|1 labels."))
@click.option("--gold", "gold_path", required=True, help=_("Gold sent_id<TAB>0|1 labels."))
@click.option("--out", "out", default="-")
@click.pass_context
def eval_triples(ctx, labels_path, gold_path, out):
    """Precision, recall and F1 of sentence labels."""
    get_config(ctx, {})
    with timed("eval-triples", "sentences") as summary:
        predicted = load_gold(labels_path)
        report = prf1(predicted.labels, load_gold(gold_path))
        report.write(out)
        summary["count"] = len(predicted)


@click.command("kappa")
@click.option("--a", "a_path", required=True, help=_("First annotator's labels."))
@click.option("--b", "b_path", required=True, help=_("Second annotator's labels."))
@click.pass_context
def kappa(ctx, a_path, b_path):
    """Cohen's kappa between two annotators."""
    get_config(ctx, {})
    with timed("kappa", "sentences") as summary:
        a = load_gold(a_path)
        value = cohens_kappa(a, load_gold(b_path))
        click.echo("kappa\t{0:.6f}".format(value))
        summary["count"] = len(a)


@click.command("pipeline")
@click.option("--in", "in_path", required=True, help=_("JSON-lines tweet file."))
@click.option("--out", "out", default="-", help=_("Ranked TSV; standard output by default."))
@click.option("--workdir", default=None, help=_("Keep intermediate files here; a temporary directory otherwise."))
@click.option("--pos-lex", "pos_lex_path", default=None)
@config_options("on_error", "threshold", "min_pair_count", "max_passes", "dim", "window", "negative", "epochs",
                "min_count", "subsample", "lr", "seed", "workers", "batch_words", "seeds", "k", "merge",
                "exclude_need_forms")
@click.pass_context
def pipeline(ctx, in_path, out, workdir, pos_lex_path, **options):
    """Run ingest, mine-phrases, annotate, train and top-needs in one go."""
    config = get_config(ctx, options)
    with timed("pipeline", "stages") as summary, contextlib.ExitStack() as stack:
        if workdir is None:
            workdir = stack.enter_context(tempfile.TemporaryDirectory(prefix="needstack-"))
        os.makedirs(workdir, exist_ok=True)
        paths = {stage: os.path.join(workdir, name) for stage, name in hooks.pipeline_artifacts.items()}
        stages = {
            "ingest": lambda: run_ingest(config, in_path, paths["ingest"]),
            "mine-phrases": lambda: run_mine_phrases(config, paths["ingest"], paths["mine-phrases"]),
            "annotate": lambda: run_annotate(config, paths["ingest"], paths["mine-phrases"], paths["annotate"]),
            "train": lambda: run_train(config, paths["annotate"], paths["train"]),
            "top-needs": lambda: run_top_needs(config, paths["train"], pos_lex_path, out),
        }
        for stage in hooks.pipeline_stages:
            logger.info("pipeline stage %s", stage)
            stages[stage]()
            summary["count"] += 1


commands = [
    ingest,
    mine,
    annotate,
    train,
    pos_lexicon,
    top_needs,
    extract,
    baseline,
    eval_topk,
    eval_triples,
    kappa,
    pipeline,
]

for command in commands:
    cli.add_command(command)


def main(args=None):
    """Console entry point: 0 on success, 1 for usage and configuration errors, 2 for bad input."""
    try:
        code = cli.main(args=args, prog_name=hooks.app_name, standalone_mode=False)
    except click.exceptions.Abort:
        click.echo(_("Aborted!"), err=True)
        code = 1
    except click.ClickException as e:
        e.show()
        code = 1
    sys.exit(code or 0)


if __name__ == "__main__":
    main()
