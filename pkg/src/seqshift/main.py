"""CLI entry point for seqshift."""

import logging
from functools import partial
from pathlib import Path

import click
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from seqshift import __version__
from seqshift.config import SeqshiftSettings, load_config
from seqshift.errors import SeqshiftRuntimeError, SeqshiftValidationError

console = Console()
logger = logging.getLogger(__name__)

EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def setup_logging(verbose: bool = False) -> None:
    """Configure logging with rich output."""
    level = logging.DEBUG if verbose else logging.INFO

    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True)],
    )


class SeqshiftGroup(click.Group):
    """Maps seqshift errors onto exit codes."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except (SeqshiftValidationError, ValidationError, FileNotFoundError) as e:
            console.print(f"[red]✗[/red] {e}")
            ctx.exit(EXIT_VALIDATION)
        except SeqshiftRuntimeError as e:
            console.print(f"[red]✗[/red] {e}")
            ctx.exit(EXIT_RUNTIME)


def _settings(ctx: click.Context) -> SeqshiftSettings:
    return ctx.obj["settings"]


@click.group(cls=SeqshiftGroup)
@click.version_option(__version__, prog_name="seqshift")
@click.option("-v", "--verbose", is_flag=True, help="Enable verbose logging")
@click.option("--seed", type=int, default=None, help="Base seed (overrides config)")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Decoding threads")
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="JSON or YAML settings file",
)
@click.pass_context
def cli(
    ctx: click.Context,
    verbose: bool,
    seed: int | None,
    threads: int | None,
    config_path: str | None,
) -> None:
    """seqshift - decoding engine and harness for language-domain shift in ASR."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    setup_logging(verbose)

    settings = load_config(config_path)
    overrides = {k: v for k, v in {"seed": seed, "threads": threads}.items() if v is not None}
    ctx.obj["settings"] = settings.model_copy(update=overrides)


@cli.command("lm-train")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--order", type=click.IntRange(min=1), default=None, help="n-gram order")
@click.option("--discount", type=float, default=None, help="Absolute discount d in (0, 1)")
@click.option("--mle", is_flag=True, help="Unsmoothed maximum likelihood")
@click.option("--vocab", "vocab_path", type=click.Path(exists=True), default=None)
@click.option("--max-vocab", type=click.IntRange(min=1), default=None)
@click.pass_context
def lm_train(
    ctx: click.Context,
    corpus: str,
    output: str,
    order: int | None,
    discount: float | None,
    mle: bool,
    vocab_path: str | None,
    max_vocab: int | None,
) -> None:
    """Estimate an n-gram LM and write it as ARPA."""
    from seqshift.lm import Smoothing, save_arpa, train_ngram
    from seqshift.text import Corpus, Vocabulary, build_vocabulary

    settings = _settings(ctx)
    text = Corpus.load(corpus)
    vocab = Vocabulary.load(vocab_path) if vocab_path else build_vocabulary(text, max_vocab)
    smoothing = Smoothing.MLE if mle else Smoothing.ABSOLUTE_DISCOUNT
    model = train_ngram(
        text,
        vocab,
        order or settings.lm_order,
        smoothing,
        discount if discount is not None else settings.discount,
    )
    save_arpa(model, output)
    console.print(
        f"[green]✓[/green] {model.order}-gram ({smoothing.value}) over {len(vocab)} "
        f"symbols written to {output}"
    )


@cli.command("lm-eval")
@click.argument("lm", type=click.Path(exists=True, dir_okay=False))
@click.argument("corpora", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--bpe", "bpe_path", type=click.Path(exists=True), help="Adds tokens/word")
@click.option("--subword-lm", type=click.Path(exists=True), help="BPE-level twin of LM")
@click.option("--format", "fmt", type=click.Choice(["table", "markdown", "tsv"]), default="table")
def lm_eval(
    lm: str,
    corpora: tuple[str, ...],
    bpe_path: str | None,
    subword_lm: str | None,
    fmt: str,
) -> None:
    """OOV rate and perplexity of an LM on one or more corpora."""
    from seqshift.harness import domain_stats, emit_domain_stats, emit_subword_ppl
    from seqshift.harness.report import emit_corpus_info, format_ppl, format_rate
    from seqshift.harness.stats import subword_ppl_rows
    from seqshift.lm import load_arpa
    from seqshift.text import BpeModel, Corpus

    model = load_arpa(lm)
    texts = [Corpus.load(path) for path in corpora]
    bpe = BpeModel.load(bpe_path) if bpe_path else None
    name = Path(lm).stem
    stats = domain_stats({name: model}, texts, bpe)

    if fmt != "table":
        click.echo(emit_domain_stats(stats, fmt), nl=False)
        click.echo(emit_corpus_info(stats, fmt), nl=False)
    else:
        table = Table(title=f"LM {name}")
        table.add_column("Corpus", style="cyan")
        table.add_column("Words", justify="right")
        table.add_column("Vocab", justify="right")
        table.add_column("OOV [%]", justify="right")
        table.add_column("PPL", justify="right")
        if bpe is not None:
            table.add_column("Tokens/word", justify="right")
        for info in stats.corpora:
            row = stats.get(name, info.name)
            cells = [
                info.name,
                str(info.running_words),
                str(info.vocab_size),
                format_rate(row.oov),
                format_ppl(row.ppl),
            ]
            if info.token_word_ratio is not None:
                cells.append(f"{info.token_word_ratio:.2f}")
            table.add_row(*cells)
        console.print(table)

    if subword_lm:
        if bpe is None:
            raise SeqshiftValidationError("--subword-lm needs --bpe")
        rows = subword_ppl_rows({name: (model, load_arpa(subword_lm))}, texts, bpe)
        click.echo(emit_subword_ppl(rows, "markdown" if fmt == "table" else fmt), nl=False)


@cli.command("bpe-learn")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--merges", type=click.IntRange(min=0), required=True, help="Number of merges")
def bpe_learn_cmd(corpus: str, output: str, merges: int) -> None:
    """Learn BPE merges from a corpus."""
    from seqshift.text import Corpus, bpe_learn

    model = bpe_learn(Corpus.load(corpus), merges)
    model.save(output)
    console.print(
        f"[green]✓[/green] {len(model.merges)} merges, {len(model.vocab)} subwords -> {output}"
    )


@cli.command("bpe-apply")
@click.argument("bpe", type=click.Path(exists=True, dir_okay=False))
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def bpe_apply_cmd(bpe: str, corpus: str, output: str | None) -> None:
    """Segment a corpus into subwords."""
    from seqshift.text import BpeModel, Corpus, bpe_apply_corpus

    model = BpeModel.load(bpe)
    text = Corpus.load(corpus)
    segmented = bpe_apply_corpus(model, text)
    if output:
        segmented.save(output)
    else:
        for line in segmented.lines:
            click.echo(" ".join(line))
    ratio = segmented.num_words / text.num_words if text.num_words else 0.0
    console.print(f"[green]✓[/green] {segmented.num_words} tokens, {ratio:.3f} tokens/word")


@cli.command("lexicon-check")
@click.argument("lexicon", type=click.Path(exists=True, dir_okay=False))
@click.option("--vocab", "vocab_path", type=click.Path(exists=True), default=None)
def lexicon_check(lexicon: str, vocab_path: str | None) -> None:
    """Validate a lexicon and report its inventory and prefix tree."""
    from seqshift.lexicon import Lexicon, build_prefix_tree
    from seqshift.text import Vocabulary

    lex = Lexicon.load(lexicon)
    tree = build_prefix_tree(lex)
    num_prons = sum(len(lex.pronunciations(w)) for w in lex.words)

    table = Table(title=f"Lexicon {Path(lexicon).name}")
    table.add_column("Property", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("Words", str(len(lex)))
    table.add_row("Pronunciations", str(num_prons))
    if lex.inventory is not None:
        table.add_row("Base phonemes", str(len(lex.inventory.bases)))
        table.add_row("Inventory symbols", str(len(lex.inventory)))
    table.add_row("Tree nodes", str(len(tree)))
    console.print(table)

    if vocab_path:
        lex.check_vocab(Vocabulary.load(vocab_path))
        console.print("[green]✓[/green] every vocabulary word has a pronunciation")


@cli.command("synth-gen")
@click.option("--toy", "toy_dir", type=click.Path(file_okay=False), help="Write a toy world")
@click.option("--references", type=click.Path(exists=True, dir_okay=False))
@click.option("--lexicon", type=click.Path(exists=True, dir_okay=False))
@click.option("--bpe", "bpe_path", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--kind",
    type=click.Choice(["factored", "phon-blank", "bpe-blank", "bpe-label"]),
    default="phon-blank",
)
@click.option("--name", default="synth", help="Dataset name")
@click.option("--tau", type=click.FloatRange(min=0.0), default=0.0)
@click.option("--gain", type=click.FloatRange(min=0.0), default=None)
@click.option("--frames-per-label", type=click.IntRange(min=1), default=None)
@click.option("-o", "--output", type=click.Path(file_okay=False), default=None)
@click.pass_context
def synth_gen(
    ctx: click.Context,
    toy_dir: str | None,
    references: str | None,
    lexicon: str | None,
    bpe_path: str | None,
    kind: str,
    name: str,
    tau: float,
    gain: float | None,
    frames_per_label: int | None,
    output: str | None,
) -> None:
    """Synthesize acoustics for references, or a complete toy world with --toy."""
    from seqshift.emitter import generate_synth_set, save_synth_set
    from seqshift.harness import build_toy_world, write_toy_world
    from seqshift.lexicon import Lexicon
    from seqshift.models import EmitterConfig
    from seqshift.text import BpeModel, Corpus

    settings = _settings(ctx)
    if toy_dir:
        path = write_toy_world(build_toy_world(settings.seed), toy_dir)
        console.print(f"[green]✓[/green] Toy world written, experiment: {path}")
        return

    if not (references and lexicon and output):
        raise click.UsageError("--references, --lexicon and -o are required without --toy")
    cfg = EmitterConfig(
        tau=tau,
        gain=gain if gain is not None else settings.logit_gain,
        frames_per_label=frames_per_label or settings.frames_per_label,
        seed=settings.seed,
    )
    lex = Lexicon.load(lexicon)
    bpe = BpeModel.load(bpe_path) if bpe_path else None
    refs = Corpus.load(references).lines
    synth_set = generate_synth_set(name, refs, kind, cfg, lex, bpe)
    manifest = save_synth_set(synth_set, output)
    console.print(f"[green]✓[/green] {len(synth_set)} utterances, manifest: {manifest}")


@cli.command("calibrate-tau")
@click.option("--lexicon", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--references", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--target", required=True, type=click.FloatRange(0.0, 1.0, max_open=True))
@click.option("--tolerance", type=click.FloatRange(min=0.0, min_open=True), default=0.002)
@click.option("--lm", "lm_path", type=click.Path(exists=True), help="Word LM (default uniform)")
@click.option("--tau-max", type=click.FloatRange(min=0.0, min_open=True), default=None)
@click.pass_context
def calibrate_tau_cmd(
    ctx: click.Context,
    lexicon: str,
    references: str,
    target: float,
    tolerance: float,
    lm_path: str | None,
    tau_max: float | None,
) -> None:
    """Find the temperature whose CTC decoding WER matches a target."""
    from seqshift.emitter import calibrate_tau
    from seqshift.harness import CtcTauEvaluator, error_profile, format_wer
    from seqshift.lexicon import Lexicon
    from seqshift.lm import NGramModel, load_arpa
    from seqshift.models import DecodeConfig, EmitterConfig
    from seqshift.text import Corpus

    settings = _settings(ctx)
    lex = Lexicon.load(lexicon)
    lm = load_arpa(lm_path) if lm_path else NGramModel.uniform(lex.vocab)
    evaluator = CtcTauEvaluator(
        lex,
        lm,
        Corpus.load(references).lines,
        emitter=EmitterConfig(gain=settings.logit_gain, frames_per_label=settings.frames_per_label),
        decode_cfg=DecodeConfig(beam_size=settings.beam_size, score_pruning=settings.score_pruning),
        threads=settings.threads,
    )
    seeds = [settings.seed + i for i in range(settings.calibration_seeds)]
    result = calibrate_tau(
        evaluator, target, tolerance, tau_max=tau_max or settings.tau_max, seeds=seeds
    )

    console.print(f"[green]✓[/green] tau = {result.tau:.4f}")
    console.print(f"Mean WER: {format_wer(result.mean_wer)}% (spread {format_wer(result.spread)})")
    report = evaluator.report_at(result.tau)
    if report.errors:
        sub, ins, dele = error_profile(report)
        console.print(f"Profile: sub {sub:.1%}, ins {ins:.1%}, del {dele:.1%}")
    console.print(f"[dim]{len(result.measurements)} measurements over {len(seeds)} seeds[/dim]")


@cli.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--model-kind",
    required=True,
    type=click.Choice(["ctc", "fh_di", "fh_tri", "transducer", "aed"]),
)
@click.option("--unit", type=click.Choice(["phon", "bpe"]), default="phon")
@click.option("--vocab-mode", type=click.Choice(["closed", "open"]), default="closed")
@click.option("--lexicon", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--lm", "lm_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--bpe", "bpe_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--prior", type=click.Path(exists=True, dir_okay=False))
@click.option("--ilm", type=click.Path(exists=True, dir_okay=False))
@click.option("--ilm-order", type=click.Choice(["0", "1", "inf"]), default="inf")
@click.option("--lm-scale", type=click.FloatRange(min=0.0), default=1.0)
@click.option("--prior-scale", type=click.FloatRange(min=0.0), default=0.0)
@click.option("--transition-scale", type=click.FloatRange(min=0.0), default=1.0)
@click.option("--length-norm", type=click.FloatRange(min=0.0), default=0.0)
@click.option("--beam-size", type=click.IntRange(min=1), default=None)
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write hypotheses")
@click.pass_context
def decode(
    ctx: click.Context,
    manifest: str,
    model_kind: str,
    unit: str,
    vocab_mode: str,
    lexicon: str,
    lm_path: str,
    bpe_path: str | None,
    prior: str | None,
    ilm: str | None,
    ilm_order: str,
    lm_scale: float,
    prior_scale: float,
    transition_scale: float,
    length_norm: float,
    beam_size: int | None,
    output: str | None,
) -> None:
    """Decode a manifest and report WER."""
    from seqshift.emitter import read_manifest
    from seqshift.harness import ModelDecoder, decode_dataset, format_wer, load_items
    from seqshift.lexicon import Lexicon
    from seqshift.lm import load_arpa
    from seqshift.models import DecodeConfig, ModelSpec
    from seqshift.text import BpeModel

    settings = _settings(ctx)
    spec = ModelSpec.model_validate(
        {
            "name": model_kind,
            "kind": model_kind,
            "unit": unit,
            "vocab_mode": vocab_mode,
            "prior": prior,
            "ilm": ilm,
            "ilm_order": ilm_order,
        }
    )
    cfg = DecodeConfig(
        lm_scale=lm_scale,
        prior_scale=prior_scale,
        transition_scale=transition_scale,
        length_norm=length_norm,
        beam_size=beam_size or settings.beam_size,
        score_pruning=settings.score_pruning,
        vocab_mode=spec.vocab_mode,
    )
    bpe = BpeModel.load(bpe_path) if bpe_path else None
    decoder = ModelDecoder.load(spec, Lexicon.load(lexicon), bpe)
    items = load_items(read_manifest(manifest), spec.acoustic_kind)
    lm = load_arpa(lm_path)
    result = decode_dataset(partial(decoder.decode, lm=lm, cfg=cfg), items, settings.threads)

    if output:
        with open(output, "w", encoding="utf-8") as f:
            for utt in result.results:
                f.write(f"{utt.utt_id}\t{' '.join(utt.hypothesis)}\n")
    report = result.report
    failed = sum(1 for utt in result.results if utt.error is not None)
    console.print(
        f"[green]✓[/green] WER {format_wer(report.wer)}% "
        f"(S={report.substitutions} I={report.insertions} D={report.deletions} "
        f"N={report.ref_length}) over {len(items)} utterances"
    )
    if failed:
        console.print(f"[yellow]{failed} utterances without a hypothesis[/yellow]")


@cli.command()
@click.argument("spec_path", metavar="SPEC", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.pass_context
def experiment(ctx: click.Context, spec_path: str, output: str) -> None:
    """Run a comparative domain-shift experiment."""
    from seqshift.harness import emit_report, load_experiment, run_experiment, save_results

    settings = _settings(ctx)
    loaded = load_experiment(spec_path, threads=settings.threads)
    results = run_experiment(loaded)
    save_results(results, output)
    console.print(f"[green]✓[/green] {len(results.cells)} cells written to {output}")
    console.print(emit_report(results, "markdown"), markup=False)


@cli.command()
@click.argument("results_path", metavar="RESULTS", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["markdown", "tsv"]), default="markdown")
@click.option("--profiles", is_flag=True, help="Show S/I/D shares per cell instead of WERs")
def report(results_path: str, fmt: str, profiles: bool) -> None:
    """Render an experiment result file."""
    from seqshift.harness import emit_profile_report, emit_report, load_results

    results = load_results(results_path)
    text = emit_profile_report(results, fmt) if profiles else emit_report(results, fmt)
    click.echo(text, nl=False)


def main() -> None:
    """Main entry point."""
    cli()


if __name__ == "__main__":
    main()
