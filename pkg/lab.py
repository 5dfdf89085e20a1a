import argparse
import json
import logging

from concurrent import futures
from pathlib import Path

from pydantic import ValidationError

from config import DEBUG, WORKERS
from errors import ConfigurationError, LabError, StorageError
from evolution import evolve_perturbed
from reports import (
    BranchRecord,
    MinimizerRecord,
    RunConfig,
    StabilityReport,
    WaveRecord,
    read_stability_report,
    read_waves,
    write_branch_csv,
    write_eigenvalues_csv,
    write_model,
    write_report_table,
    write_trace_csv,
)
from stability import StabilityAnalysis, analyze_wave
from utils import configure_logging, get_output_dir
from waves import (
    MinimizerSettings,
    WaveBranchPoint,
    continue_branch,
    minimize,
    newton_solve_fixed_amplitude,
    stokes_wave,
)

logger = logging.getLogger(__name__)

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_STORAGE = 4


def cmd_stokes(config: RunConfig) -> list[Path]:
    """Write the truncated Stokes expansion at amplitude ``config.a`` as a wave file."""
    wave = stokes_wave(config.p, config.branch, config.a, config.order, config.N)
    record = WaveRecord.from_point(WaveBranchPoint.from_stokes(wave))
    path = get_output_dir(config.output_dir) / f"stokes_p{config.p}_{config.branch.value}_a{config.a:.6g}.json"
    logger.info(f"[Stokes p={config.p} {config.branch.value}] a={config.a} c={wave.c:.15g} -> {path}")
    return [write_model(path, record)]


def cmd_branch(config: RunConfig) -> tuple[list[Path], BranchRecord]:
    """
    Continue a branch and write it as JSON plus an (a, c, residual, nodal_min) CSV.
    Aborted branches are written with their converged prefix.
    """
    branch = continue_branch(config.p, config.branch, config.a_start, config.a_end, config.steps, config.N,
                             config.newton_tol, config.newton_max_iterations)
    record = BranchRecord.from_branch(branch)
    stem = get_output_dir(config.output_dir) / f"branch_p{config.p}_{config.branch.value}"
    json_path = write_model(stem.with_suffix(".json"), record)
    try:
        csv_path = write_branch_csv(stem.with_suffix(".csv"), record)
    except (StorageError, OSError):
        # a branch is written as both files or neither
        json_path.unlink(missing_ok=True)
        raise
    return [json_path, csv_path], record


def _analyze_record(record: WaveRecord, config: RunConfig) -> tuple[StabilityAnalysis, StabilityReport]:
    """Analyse one stored wave, first solving it with Newton if its residual is above tolerance."""
    wave = record.to_point()
    if not wave.is_converged(config.newton_tol):
        logger.info(f"[Stability p={wave.p} {wave.branch.value} a={wave.a:.4g}] residual {wave.residual:.3e}, "
                    f"solving with Newton before the analysis")
        wave = newton_solve_fixed_amplitude(wave, config.newton_tol, config.newton_max_iterations)
    analysis = analyze_wave(wave, config.eigen_tol, config.eps_re, config.eps_im, tol=config.newton_tol)
    return analysis, StabilityReport.from_analysis(analysis, config.eigen_tol)


def cmd_stability(source: Path, config: RunConfig) -> list[Path]:
    """
    Run both stability routes on every wave in a wave or branch file. Points are
    analysed in parallel; outputs are numbered by point index.
    """
    records = read_waves(source)
    out_dir = get_output_dir(config.output_dir)

    with futures.ThreadPoolExecutor(max_workers=config.workers) as executor:
        results = list(executor.map(lambda record: _analyze_record(record, config), records))

    paths = []
    for i, (analysis, report) in enumerate(results):
        stem = out_dir / f"stability_{Path(source).stem}_{i:03d}"
        paths.append(write_model(stem.with_suffix(".json"), report))
        paths.append(write_eigenvalues_csv(stem.parent / f"{stem.name}_eigenvalues.csv", analysis.jl.eigenvalues))
    return paths


def cmd_evolve(source: Path, config: RunConfig, index: int = 0) -> list[Path]:
    """Evolve the perturbed wave number ``index`` of a wave or branch file and write its trace."""
    records = read_waves(source)
    if not 0 <= index < len(records):
        raise ConfigurationError(f"{source} holds {len(records)} waves, index {index} is out of range.")
    wave = records[index].to_point()

    trace = evolve_perturbed(wave, config.epsilon, config.T, config.dt, config.seed, config.stride)
    path = get_output_dir(config.output_dir) / f"evolve_{Path(source).stem}_{index:03d}_seed{config.seed}.csv"
    return [write_trace_csv(path, trace)]


def cmd_minimize(config: RunConfig) -> list[Path]:
    settings = MinimizerSettings(config.grad_tol, config.stagnation_tol, config.stagnation_window,
                                 config.max_iterations)
    run = minimize(config.p, config.c, config.constraint_level, config.N, config.seed,
                   config.sector, config.restriction, settings)
    record = MinimizerRecord.from_run(run, config.grad_tol, config.stagnation_tol)
    path = get_output_dir(config.output_dir) / f"minimize_p{config.p}_c{config.c:.6g}_seed{config.seed}.json"
    return [write_model(path, record)]


def cmd_report(sources: list[Path], config: RunConfig) -> list[Path]:
    """Merge stability reports into one CSV table."""
    reports = [read_stability_report(source) for source in sources]
    return [write_report_table(get_output_dir(config.output_dir) / "report.csv", reports)]


def create_error(error_message: str) -> dict:
    return {
        "status": "ERROR",
        "error_message": error_message,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Standing waves of the focusing NLS on the bi-torus.")
    parser.add_argument("--debug", action="store_true", default=DEBUG, help="Log at DEBUG level.")
    parser.add_argument("--output-dir", dest="output_dir", help="Directory for output files.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def wave_options(subparser: argparse.ArgumentParser):
        subparser.add_argument("--p", type=int, help="Power of the nonlinearity.")
        subparser.add_argument("--branch", choices=["ss", "eplus", "eminus"], help="Generating mode.")
        subparser.add_argument("--N", type=int, help="Truncation.")

    stokes = subparsers.add_parser("stokes", help="Write a Stokes expansion.")
    wave_options(stokes)
    stokes.add_argument("--a", type=float, help="Amplitude of the generating mode.")
    stokes.add_argument("--order", type=int, help="Highest power of a, 2 or 3.")

    branch = subparsers.add_parser("branch", help="Continue a branch in amplitude.")
    wave_options(branch)
    branch.add_argument("--a-start", dest="a_start", type=float)
    branch.add_argument("--a-end", dest="a_end", type=float)
    branch.add_argument("--steps", type=int)
    branch.add_argument("--newton-tol", dest="newton_tol", type=float)
    branch.add_argument("--newton-max-iterations", dest="newton_max_iterations", type=int)

    stability = subparsers.add_parser("stability", help="Analyse a wave or branch file.")
    stability.add_argument("source", type=Path)
    stability.add_argument("--eigen-tol", dest="eigen_tol", type=float)
    stability.add_argument("--eps-re", dest="eps_re", type=float)
    stability.add_argument("--eps-im", dest="eps_im", type=float)
    stability.add_argument("--workers", type=int, default=WORKERS)

    evolve = subparsers.add_parser("evolve", help="Evolve a perturbed wave.")
    evolve.add_argument("source", type=Path)
    evolve.add_argument("--index", type=int, default=0, help="Wave index within a branch file.")
    evolve.add_argument("--T", type=float)
    evolve.add_argument("--dt", type=float)
    evolve.add_argument("--epsilon", type=float)
    evolve.add_argument("--seed", type=int)
    evolve.add_argument("--stride", type=int)

    minimizer = subparsers.add_parser("minimize", help="Minimize B_c under the power constraint.")
    minimizer.add_argument("--p", type=int)
    minimizer.add_argument("--N", type=int)
    minimizer.add_argument("--c", type=float)
    minimizer.add_argument("--constraint-level", dest="constraint_level", type=float)
    minimizer.add_argument("--seed", type=int)
    minimizer.add_argument("--restriction", choices=["ss", "eplus", "eminus"])
    minimizer.add_argument("--grad-tol", dest="grad_tol", type=float)
    minimizer.add_argument("--stagnation-tol", dest="stagnation_tol", type=float)
    minimizer.add_argument("--max-iterations", dest="max_iterations", type=int)

    report = subparsers.add_parser("report", help="Merge stability reports into a table.")
    report.add_argument("sources", type=Path, nargs="+")

    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    """Fields given on the command line override the configured defaults."""
    overrides = {key: value for key, value in vars(args).items()
                 if key in RunConfig.model_fields and value is not None}
    if getattr(args, "restriction", None) is not None:
        overrides["branch"] = args.restriction
    return RunConfig(**overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.debug)

    try:
        config = run_config_from_args(args)
        match args.command:
            case "stokes":
                paths = cmd_stokes(config)
            case "branch":
                paths, record = cmd_branch(config)
                if record.status == "aborted":
                    print(json.dumps(create_error(record.error)))
                    return EXIT_NUMERICAL
            case "stability":
                paths = cmd_stability(args.source, config)
            case "evolve":
                paths = cmd_evolve(args.source, config, args.index)
            case "minimize":
                paths = cmd_minimize(config)
            case "report":
                paths = cmd_report(args.sources, config)
            case _:
                print(json.dumps(create_error(f"Unknown command {args.command}.")))
                return EXIT_VALIDATION
    except ValidationError as e:
        print(json.dumps(create_error(str(e))))
        return EXIT_VALIDATION
    except LabError as e:
        print(json.dumps(create_error(str(e))))
        return e.exit_code
    except OSError as e:
        print(json.dumps(create_error(str(e))))
        return EXIT_STORAGE

    print(json.dumps({"status": "SUCCESS", "outputs": [str(path) for path in paths]}))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
