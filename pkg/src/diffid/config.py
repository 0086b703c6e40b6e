"""JSON run configuration: schema validation and assembly of problem data."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .certificates import CertifyOptions
from .errors import ConfigurationError
from .grids import Domain, Grid, build_grid
from .problem import ProblemData
from .scenarios import SCENARIO_NAMES, Scenario, build_scenario
from .sinebasis import OmegaData, SpectralParams


@dataclass(frozen=True)
class RunConfig:
    grid: Grid
    params: SpectralParams
    theta: float
    certify: CertifyOptions
    tol_F: float
    max_iters: int
    force: bool
    scenario_name: str | None
    scenario_scale: float
    data_files: dict | None
    output_dir: Path
    formats: tuple[str, ...]
    synth_ny: int


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigurationError(f"config: missing required key {where}.{key}")
    return section[key]


def _section(raw: dict, key: str, required: bool = True) -> dict:
    sec = raw.get(key)
    if sec is None:
        if required:
            raise ConfigurationError(f"config: missing required section '{key}'")
        return {}
    if not isinstance(sec, dict):
        raise ConfigurationError(f"config: section '{key}' must be an object")
    return sec


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as err:
        raise ConfigurationError(f"config file not found: {path}") from err
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"config is not valid JSON: {err}") from err

    dom_sec = _section(raw, "domain")
    dim = int(dom_sec.get("dim", 1))
    if dim not in (1, 2):
        raise ConfigurationError(f"config: domain.dim must be 1 or 2, got {dim}")
    Lx = float(_require(dom_sec, "Lx", "domain"))
    T = float(_require(dom_sec, "T", "domain"))
    if dim == 2:
        lengths = (Lx, float(_require(dom_sec, "Ly", "domain")))
    else:
        lengths = (Lx,)
    domain = Domain(lengths, T)

    grid_sec = _section(raw, "grid")
    Nx = int(_require(grid_sec, "Nx", "grid"))
    Nt = int(_require(grid_sec, "Nt", "grid"))
    Ny = int(_require(grid_sec, "Ny", "grid")) if dim == 2 else None
    grid = build_grid(domain, Nx=Nx, Nt=Nt, Ny=Ny)

    spec_sec = _section(raw, "spectral")
    params = SpectralParams(
        K=int(_require(spec_sec, "K", "spectral")),
        epsilon=float(spec_sec.get("epsilon", 1.0)),
        Ny=int(grid_sec["Ny_quad"]) if "Ny_quad" in grid_sec else None,
    )

    theta = float(_section(raw, "scheme", required=False).get("theta", 0.5))

    cert_sec = _section(raw, "certify", required=False)
    certify = CertifyOptions(
        C_S=float(cert_sec.get("C_S", 1.0)),
        boundary_margin=int(cert_sec.get("boundary_margin", 2)),
        psi_floor=float(cert_sec.get("psi_floor", 1e-12)),
    )

    pic_sec = _section(raw, "picard", required=False)
    tol_F = float(pic_sec.get("tol_F", 1e-10))
    max_iters = int(pic_sec.get("max_iters", 50))
    force = bool(pic_sec.get("force_on_failed_certificate", False))
    if tol_F <= 0 or max_iters < 1:
        raise ConfigurationError("config: picard.tol_F must be > 0 and max_iters >= 1")

    scn_sec = raw.get("scenario")
    data_sec = raw.get("data")
    if (scn_sec is None) == (data_sec is None):
        raise ConfigurationError("config: exactly one of 'scenario' or 'data' must be present")

    scenario_name = None
    scenario_scale = 1.0
    data_files = None
    if scn_sec is not None:
        scenario_name = str(_require(scn_sec, "name", "scenario"))
        if scenario_name not in SCENARIO_NAMES:
            raise ConfigurationError(
                f"config: unknown scenario {scenario_name!r}; choose from {SCENARIO_NAMES}")
        scenario_scale = float(scn_sec.get("scale", 1.0))
        if scenario_scale <= 0:
            raise ConfigurationError("config: scenario.scale must be positive")
    else:
        data_files = {}
        for key in ("psi_file", "f_file", "phi_file", "omega_file"):
            data_files[key] = str(_require(data_sec, key, "data"))
        if "a_file" in data_sec:
            data_files["a_file"] = str(data_sec["a_file"])

    out_sec = _section(raw, "output")
    output_dir = Path(str(_require(out_sec, "dir", "output")))
    formats = tuple(out_sec.get("formats", ["csv", "json"]))
    bad = [f for f in formats if f not in ("csv", "json")]
    if bad:
        raise ConfigurationError(f"config: unsupported output formats {bad}")
    synth_ny = int(out_sec.get("synth_ny", 32))
    if synth_ny < 2:
        raise ConfigurationError("config: output.synth_ny must be >= 2")

    return RunConfig(
        grid=grid,
        params=params,
        theta=theta,
        certify=certify,
        tol_F=tol_F,
        max_iters=max_iters,
        force=force,
        scenario_name=scenario_name,
        scenario_scale=scenario_scale,
        data_files=data_files,
        output_dir=output_dir,
        formats=formats,
        synth_ny=synth_ny,
    )


def assemble_scenario(cfg: RunConfig) -> Scenario:
    if cfg.scenario_name is None:
        raise ConfigurationError("config: this command needs a scenario, not data files")
    return build_scenario(cfg.scenario_name, cfg.grid, cfg.params, scale=cfg.scenario_scale)


def assemble_data(cfg: RunConfig, base_dir: Path) -> ProblemData:
    """Problem data from either the named scenario or the data files."""
    if cfg.scenario_name is not None:
        return assemble_scenario(cfg).data

    from .fileio import read_field_as_scalar, read_mode_profiles_csv, read_modes_csv, read_profile_csv

    files = {k: _resolve(base_dir, v) for k, v in cfg.data_files.items()}
    if cfg.grid.dim != 1:
        raise ConfigurationError("data-file runs support 1-d domains only")
    psi = read_field_as_scalar(files["psi_file"], cfg.grid)
    f_modes = read_modes_csv(files["f_file"], cfg.grid, cfg.params)
    phi_modes = read_mode_profiles_csv(files["phi_file"], cfg.grid, cfg.params)
    y, omega_vals = read_profile_csv(files["omega_file"])
    if not math.isclose(y[0], 0.0, abs_tol=1e-12) or not math.isclose(y[-1], math.pi, rel_tol=1e-9):
        raise ConfigurationError("omega profile must span [0, pi]")
    if len(y) - 1 < 4 * cfg.params.K:
        raise ConfigurationError(
            f"omega profile has {len(y) - 1} subintervals; need at least 4K = {4 * cfg.params.K}")
    omega = OmegaData.from_profiles(y, omega_vals, cfg.params.K)
    return ProblemData(grid=cfg.grid, psi=psi, f_modes=f_modes,
                       phi_modes=phi_modes, omega=omega, params=cfg.params)


def _resolve(base_dir: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else base_dir / p
