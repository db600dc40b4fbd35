"""
Command-line entry point.

    commentator annotate --log game.jsonl --design 2 --seed 7 --out script.jsonl
    commentator cues --log game.jsonl
    commentator gen-trace --duration 60 --seed 1 --out trace.jsonl
    commentator synthesize --script script.jsonl --endpoint URL --audio-dir audio/
    commentator serve-mock-tts --port 8080 --behavior behavior.json
    commentator study-eval --counts 1,14,5,9,10 --n 39

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

import json
import logging
from pathlib import Path
from typing import Any, Optional

import click

from commentator.cli_utils import (
    configure_logging,
    parse_counts,
    print_hypotheses,
    print_run_info,
    print_study_result,
)
from commentator.config import CommentaryConfig, load_config
from commentator.errors import CommentatorError, ConfigurationError, FrameLogError, StudyDomainError
from commentator.game_model import iter_log_events
from commentator.highlight_engine import RankActTable, iter_cues
from commentator.mock_tts import MockBehavior, serve_forever
from commentator.scheduler_pipeline import read_script, run_pipeline, write_script
from commentator.study_eval import (
    PreferenceCounts,
    chi_square_gof,
    evaluate_hypotheses,
    standardized_residuals,
)
from commentator.trace_gen import generate_trace_lines
from commentator.tts_client import TTSClient, synthesize_script

logger = logging.getLogger(__name__)

LOG_PATH = click.Path(exists=True, dir_okay=False, allow_dash=True)
OUT_PATH = click.Path(dir_okay=False, writable=True, allow_dash=True)


def _settings(ctx: click.Context, **overrides: Any) -> CommentaryConfig:
    try:
        return load_config(ctx.obj.get("config_path"), **overrides)
    except ConfigurationError as e:
        raise click.UsageError(str(e), ctx) from e


@click.group()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Optional TOML config file; command-line flags override its values.",
)
@click.option(
    "--log-level",
    default="WARNING",
    show_default=True,
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
)
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[Path], log_level: str) -> None:
    """Highlight-driven fighting-game commentator."""
    configure_logging(log_level)
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


@cli.command()
@click.option("--log", "log_path", required=True, type=LOG_PATH, help="Frame log (JSONL); '-' reads stdin.")
@click.option("--design", type=click.IntRange(1, 5), help="Phonetic design 1..5.")
@click.option("--seed", type=click.IntRange(min=0), help="Template selection seed.")
@click.option("--templates", "templates_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Template library (JSONL).")
@click.option("--out", "out_path", default="-", show_default=True, type=OUT_PATH, help="Script output (JSONL).")
@click.pass_context
def annotate(
    ctx: click.Context,
    log_path: str,
    design: Optional[int],
    seed: Optional[int],
    templates_path: Optional[Path],
    out_path: str,
) -> None:
    """Write the commentary script for a frame log."""
    settings = _settings(ctx, design=design, seed=seed, templates_path=templates_path)
    try:
        engine = settings.create_engine()
    except ConfigurationError as e:
        raise click.UsageError(str(e), ctx) from e
    print_run_info(engine)

    try:
        with click.open_file(log_path, "rb") as log:
            script = run_pipeline(log, engine)
    except FrameLogError as e:
        raise click.ClickException(f"{log_path}: {e}") from e

    with click.open_file(out_path, "w", encoding="utf-8") as out:
        write_script(script, out)
    logger.info("Wrote %d directives to %s", len(script), out_path)


@cli.command()
@click.option("--log", "log_path", required=True, type=LOG_PATH, help="Frame log (JSONL); '-' reads stdin.")
@click.option("--out", "out_path", default="-", show_default=True, type=OUT_PATH)
@click.pass_context
def cues(ctx: click.Context, log_path: str, out_path: str) -> None:
    """Emit score/action/distance/highlight for every frame."""
    settings = _settings(ctx)
    try:
        round_config = settings.get_round_config()
        weights = settings.get_weights()
    except ConfigurationError as e:
        raise click.UsageError(str(e), ctx) from e

    try:
        with click.open_file(log_path, "rb") as log, click.open_file(out_path, "w", encoding="utf-8") as out:
            events = iter_log_events(log, round_config)
            for frame, frame_cues in iter_cues(events, round_config, RankActTable.default(), weights):
                record = {
                    "frame": frame.frame_index,
                    "score": frame_cues.score,
                    "action": frame_cues.action,
                    "distance": frame_cues.distance,
                    "highlight": frame_cues.highlight,
                }
                out.write(json.dumps(record, separators=(",", ":")) + "\n")
    except FrameLogError as e:
        raise click.ClickException(f"{log_path}: {e}") from e


@cli.command("gen-trace")
@click.option("--duration", "duration_s", required=True, type=click.FloatRange(min=0), help="Seconds of play.")
@click.option("--seed", default=0, show_default=True, type=click.IntRange(min=0))
@click.option("--out", "out_path", default="-", show_default=True, type=OUT_PATH)
@click.pass_context
def gen_trace(ctx: click.Context, duration_s: float, seed: int, out_path: str) -> None:
    """Generate a synthetic frame log."""
    settings = _settings(ctx)
    lines = generate_trace_lines(duration_s, seed, settings.get_round_config())
    with click.open_file(out_path, "wb") as out:
        for line in lines:
            out.write(line + b"\n")


@cli.command()
@click.option("--script", "script_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--endpoint", help="Synthesize URL (default: TTS_ENDPOINT).")
@click.option("--auth-token", help="Bearer token (default: TTS_AUTH_TOKEN).")
@click.option("--audio-dir", type=click.Path(file_okay=False, path_type=Path), help="Directory for audio files.")
@click.pass_context
def synthesize(
    ctx: click.Context,
    script_path: Path,
    endpoint: Optional[str],
    auth_token: Optional[str],
    audio_dir: Optional[Path],
) -> None:
    """Send every directive of a script to the TTS endpoint."""
    settings = _settings(ctx, tts_endpoint=endpoint, tts_auth_token=auth_token)
    try:
        script = read_script(script_path.read_text(encoding="utf-8").splitlines())
    except ValueError as e:
        raise click.ClickException(f"{script_path}: invalid script: {e}") from e

    voice = settings.get_voice_config()
    with TTSClient(
        settings.tts_endpoint,
        settings.tts_auth_token,
        voice=voice,
        timeout_s=settings.tts_timeout_s,
        audio_dir=audio_dir,
    ) as client:
        results, failures = synthesize_script(script, client)
    click.echo(f"synthesized {len(results)} of {len(script)} utterances ({len(failures)} dropped)")


@cli.command("serve-mock-tts")
@click.option("--port", default=8080, show_default=True, type=click.IntRange(0, 65535))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--behavior", "behavior_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Behaviour script (JSON).")
def serve_mock_tts(port: int, host: str, behavior_path: Optional[Path]) -> None:
    """Run the mock TTS server until interrupted."""
    behavior = MockBehavior.from_file(behavior_path) if behavior_path else None
    serve_forever(port, behavior, host=host)


@cli.command("study-eval")
@click.option("--counts", "counts_text", required=True, help="Votes per design, e.g. 1,14,5,9,10.")
@click.option("--n", "n", type=click.IntRange(min=0), help="Respondents (default: sum of counts).")
@click.option("--worst", "worst_text", help="Worst-row votes; --counts is then the Best row and hypotheses are checked.")
def study_eval(counts_text: str, n: Optional[int], worst_text: Optional[str]) -> None:
    """Chi-square goodness of fit and standardized residuals."""
    try:
        best = PreferenceCounts.of(parse_counts(counts_text), n)
        worst = PreferenceCounts.of(parse_counts(worst_text), n) if worst_text else None
    except ValueError as e:
        raise click.BadParameter(str(e)) from e

    try:
        print_study_result("Best" if worst else "Counts", chi_square_gof(best), standardized_residuals(best))
        if worst is not None:
            print_study_result("Worst", chi_square_gof(worst), standardized_residuals(worst))
            click.echo("Hypotheses:")
            print_hypotheses(evaluate_hypotheses(best, worst))
    except StudyDomainError as e:
        raise click.UsageError(str(e)) from e


def main() -> None:
    try:
        cli(prog_name="commentator")
    except CommentatorError as e:
        logger.error("%s", e)
        raise SystemExit(1) from e


if __name__ == "__main__":
    main()
