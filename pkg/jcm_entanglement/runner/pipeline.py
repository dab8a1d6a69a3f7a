"""
Scenario pipeline for the JCM entanglement simulator.

Runs every field variant of a scenario through:
Field state -> Hamiltonian -> Propagation -> Measures -> Files
"""

import logging
import time
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from ..config.settings import config
from ..exceptions import NumericalError
from ..physics.evolve import InvariantTracker, Propagator, factorized_scheme
from ..physics.hamiltonian import hamiltonian_for
from ..physics.measures import (
    PhaseSpaceGrid,
    atomic_inversion,
    concurrence,
    detect_esd,
    field_reduced,
    negativity,
    wigner,
)
from ..physics.states import (
    AtomPairState,
    FieldParams,
    bell_atoms,
    compose_initial,
    pcd_table,
    pure_field_coefficients,
    scts_from_params,
    werner_atoms,
)
from ..utils.logger import SimLogger, get_logger
from .config_file import scenario_to_raw
from .schemas import Scenario, TimeSeries
from .writers import write_json, write_rows, write_series, write_wigner

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
ENTANGLEMENT_CHANNELS = ("concurrence", "negativity", "negativity_atomA_vs_rest")


class ScenarioPipeline:
    """
    Executes one resolved Scenario and writes its output set.

    For every field variant:
    1. Build the SCTS (escalating n_max if needed) and the initial state
    2. Assemble the Hamiltonian and diagonalise it once
    3. Propagate over the time grid, sampling the requested channels
    4. Write series, Wigner snapshots, PCD table, ESD report and diagnostics
    """

    def __init__(self, scenario: Scenario, out_dir: Path, sim_logger: Optional[SimLogger] = None):
        self.scenario = scenario
        self.out_dir = Path(out_dir)
        self.sim_logger = sim_logger or get_logger(__name__)
        self.outputs = scenario.outputs
        self.samples = scenario.grid.samples

    def _atoms(self) -> AtomPairState:
        atoms = self.scenario.atoms
        return bell_atoms(atoms.theta) if atoms.kind == "bell" else werner_atoms(atoms.eta)

    def _wigner_indices(self) -> Dict[int, float]:
        indices: Dict[int, float] = {}
        for lambda_t in self.outputs.wigner_times:
            indices[int(np.argmin(np.abs(self.samples - lambda_t)))] = lambda_t
        return indices

    def run(self) -> Dict[str, Any]:
        """
        Run all field variants and write the manifest.

        Returns:
            Dictionary with per-variant statistics and the TimeSeries produced
        """
        start_time = time.time()
        self.out_dir.mkdir(parents=True, exist_ok=True)
        stats: Dict[str, Any] = {"series": {}, "resolved": {}, "files": []}
        self.sim_logger.log_run_event(
            "scenario_started",
            {"name": self.scenario.name, "variants": list(self.scenario.fields), "out_dir": str(self.out_dir)},
        )

        if self.outputs.is_empty:
            logger.info("No outputs requested, writing the manifest only")
        else:
            for label, params in self.scenario.fields.items():
                series, resolved, files = self.run_series(label, params)
                stats["series"][label] = series
                stats["resolved"][label] = resolved
                stats["files"].extend(str(path.relative_to(self.out_dir)) for path in files)

        write_json(self.out_dir / MANIFEST_NAME, self.manifest(stats["resolved"]))
        elapsed = time.time() - start_time
        self.sim_logger.log_run_event("scenario_finished", {"name": self.scenario.name, "files": len(stats["files"]) + 1})
        logger.info(f"Scenario {self.scenario.name} completed in {elapsed:.2f}s")
        return stats

    def manifest(self, resolved: Dict[str, Any]) -> Dict[str, Any]:
        model = self.scenario.model
        return {
            "scenario": scenario_to_raw(self.scenario),
            "derived": {
                "chi": model.chi,
                "chi_over_lambda": model.chi_over_lambda,
                "effective_detuning": model.effective_detuning,
                "samples": len(self.samples),
            },
            "resolved": resolved,
        }

    def run_series(self, label: str, params: FieldParams):
        """Propagate one field variant; returns (TimeSeries, resolved parameters, written files)"""
        start_time = time.time()
        scenario, outputs = self.scenario, self.outputs
        policy = scenario.model.policy

        field = scts_from_params(params, policy)
        if field.n_max != policy.n_max:
            self.sim_logger.log_truncation(f"field:{label}", field.n_max, field.tail_mass, "escalated")
        spec = scenario.model.with_policy(field.policy)
        rho0 = compose_initial(self._atoms(), field)
        H = hamiltonian_for(spec)
        propagator = Propagator(H, coupling=spec.coupling)
        tracker = InvariantTracker(H, rho0, stride=1, energy_scale=propagator.energy_scale)

        names = outputs.channel_names()
        channels = {name: np.empty(len(self.samples)) for name in names}
        exact_concurrence = np.empty(len(self.samples)) if outputs.factorized else None
        wigner_at = self._wigner_indices()
        files = []

        needs_state = any(name.startswith("negativity") for name in names)
        stride, last = config.full_state_stride, len(self.samples) - 1

        def full_at(index: int) -> bool:
            return needs_state or index in wigner_at or index % stride == 0 or index == last

        for index, sample in enumerate(propagator.run_pairs(rho0, scenario.grid, full_at)):
            state, rho_ab = sample.state, sample.rho_ab
            if state is not None:
                tracker.update(state)
            if "concurrence" in channels or exact_concurrence is not None:
                value = concurrence(rho_ab)
                if "concurrence" in channels:
                    channels["concurrence"][index] = value
                if exact_concurrence is not None:
                    exact_concurrence[index] = value
            if "negativity" in channels:
                channels["negativity"][index] = negativity(state, "atoms_vs_field")
            if "negativity_atomA_vs_rest" in channels:
                channels["negativity_atomA_vs_rest"][index] = negativity(state, "atomA_vs_rest")
            for atom in ("A", "B"):
                if f"inversion_{atom}" in channels:
                    channels[f"inversion_{atom}"][index] = atomic_inversion(rho_ab, atom)
            if index in wigner_at:
                files.extend(self._write_wigner(label, state.time, wigner_at[index], field_reduced(state)))

        report = tracker.finish()
        self.sim_logger.log_diagnostics(label, report.to_dict())
        resolved = {
            "n_max": field.n_max,
            "tail_mass": field.tail_mass,
            "pad_factor": field.policy.pad_factor,
            "full_state_stride": stride,
            "invariants": report.to_dict(),
        }

        series = TimeSeries(self.samples, channels)
        if names:
            files.append(write_series(self.out_dir / f"series_{label}.csv", series))
        if outputs.esd:
            files.append(self._write_esd(label, series))
        if outputs.pcd:
            files.append(self._write_pcd(label, params, field.rho))
        if outputs.factorized:
            path = self._write_factorized(label, params, field, exact_concurrence, resolved)
            if path is not None:
                files.append(path)
        if outputs.diagnostics:
            files.append(write_json(self.out_dir / f"diagnostics_{label}.json", resolved))

        if not report.passed:
            raise NumericalError(f"series {label!r} broke conserved quantities: {'; '.join(report.failures)}")

        logger.info(f"Series {label}: n_max={field.n_max}, {len(self.samples)} samples in {time.time() - start_time:.2f}s")
        return series, resolved, files

    def _write_wigner(self, label: str, actual_t: float, requested_t: float, rho_field: np.ndarray):
        grid = PhaseSpaceGrid.square(self.outputs.wigner_extent, self.outputs.wigner_points)
        result = wigner(rho_field, grid, method=self.outputs.wigner_method)
        path = self.out_dir / f"wigner_{label}_t{requested_t:g}.csv"
        return write_wigner(path, result, {"series": label, "lambda_t": actual_t, "requested_lambda_t": requested_t})

    def _write_esd(self, label: str, series: TimeSeries) -> Path:
        payload = {}
        for name in ENTANGLEMENT_CHANNELS:
            if name in series.channels:
                values = series.channels[name]
                report = detect_esd(series.times, values, self.outputs.esd_threshold)
                payload[name] = {**report.to_dict(), "min_value": float(np.min(values))}
        return write_json(self.out_dir / f"esd_{label}.json", payload)

    def _write_pcd(self, label: str, params: FieldParams, rho_field: np.ndarray) -> Path:
        matrix = np.real(np.diag(rho_field))
        analytic = pcd_table(
            len(matrix) - 1, params.nbar_c, params.nbar_s, params.nbar_th, params.phi, params.alpha_phase
        )
        rows = ((l, analytic[l], matrix[l], abs(analytic[l] - matrix[l])) for l in range(len(matrix)))
        return write_rows(self.out_dir / f"pcd_{label}.csv", ["l", "analytic", "matrix", "abs_diff"], rows)

    def _write_factorized(self, label, params, field, exact_concurrence, resolved) -> Optional[Path]:
        atoms = self.scenario.atoms
        if atoms.kind != "bell" or params.nbar_th > 0:
            logger.warning(f"Series {label}: factorised comparator needs Bell atoms and a pure field, skipped")
            return None

        coefficients = pure_field_coefficients(field)
        scheme = np.array(
            [concurrence(state) for state in factorized_scheme(atoms.theta, coefficients, self.scenario.grid)]
        )
        diff = np.abs(scheme - exact_concurrence)
        resolved["factorized_max_concurrence_discrepancy"] = float(np.max(diff))
        resolved["factorized_esd"] = detect_esd(self.samples, scheme, self.outputs.esd_threshold).to_dict()
        rows = zip(self.samples, exact_concurrence, scheme, diff)
        return write_rows(
            self.out_dir / f"factorized_{label}.csv",
            ["lambda_t", "concurrence_exact", "concurrence_factorized", "abs_diff"],
            rows,
        )
