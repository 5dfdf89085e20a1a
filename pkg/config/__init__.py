import yaml
import importlib.resources

config_path = importlib.resources.files(__package__) / "config.yaml"

with config_path.open() as f:
    config = yaml.safe_load(f)

DEBUG = config["debug"]
DEFAULT_OUTPUT_DIR = config["output"]["default_dir"]
OUTPUT_DIR_ENV_VAR = config["output"]["env_var"]
FORMAT_VERSION = config["output"]["format_version"]
SYMMETRY_TOL = float(config["spectral"]["symmetry_tol"])
NEWTON_TOL = float(config["newton"]["tol"])
NEWTON_MAX_ITERATIONS = config["newton"]["max_iterations"]
EIGEN_TOL_FLOOR = float(config["eigen"]["tol_floor"])
EIGEN_TOL_RELATIVE = float(config["eigen"]["tol_relative"])
SOLVABILITY_TOL = float(config["eigen"]["solvability_tol"])
JL_EPS_FACTOR = float(config["jl"]["eps_factor"])
SIGNATURE_TOL = float(config["jl"]["signature_tol"])
QUARTET_FACTOR = float(config["jl"]["quartet_factor"])
MINIMIZER_GRAD_TOL = float(config["minimizer"]["grad_tol"])
MINIMIZER_STAGNATION_TOL = float(config["minimizer"]["stagnation_tol"])
MINIMIZER_STAGNATION_WINDOW = config["minimizer"]["stagnation_window"]
MINIMIZER_MAX_ITERATIONS = config["minimizer"]["max_iterations"]
EVOLUTION_TRUNCATION_FACTOR = config["evolution"]["truncation_factor"]
BLOWUP_THRESHOLD = float(config["evolution"]["blowup_threshold"])
DEVIATION_BOUND_FACTOR = float(config["evolution"]["deviation_bound_factor"])
WORKERS = config["workers"]

__all__ = [
    "DEBUG",
    "DEFAULT_OUTPUT_DIR",
    "OUTPUT_DIR_ENV_VAR",
    "FORMAT_VERSION",
    "SYMMETRY_TOL",
    "NEWTON_TOL",
    "NEWTON_MAX_ITERATIONS",
    "EIGEN_TOL_FLOOR",
    "EIGEN_TOL_RELATIVE",
    "SOLVABILITY_TOL",
    "JL_EPS_FACTOR",
    "SIGNATURE_TOL",
    "QUARTET_FACTOR",
    "MINIMIZER_GRAD_TOL",
    "MINIMIZER_STAGNATION_TOL",
    "MINIMIZER_STAGNATION_WINDOW",
    "MINIMIZER_MAX_ITERATIONS",
    "EVOLUTION_TRUNCATION_FACTOR",
    "BLOWUP_THRESHOLD",
    "DEVIATION_BOUND_FACTOR",
    "WORKERS",
]
