import csv
import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import jinja2
import numpy as np

from ..solver import SolveResult, SweepRecord
from ..validator import ValidationResult
from ..variance import CovarianceEstimate

TRACE_HEADER = ["sweep", "L", "Ghat", "G", "max_block_delta", "elapsed_s"]


def _num(value: Optional[float]) -> Any:
    if value is None:
        return None
    value = float(value)
    if np.isfinite(value):
        return value
    return str(value)


def _fmt(value: float) -> str:
    return repr(float(value))


@dataclass
class RunReport:
    """Everything needed to rerun a command: inputs, settings and outputs."""

    command: str
    problem_file: Optional[str] = None
    config: Dict[str, Any] = field(default_factory=dict)
    result: Optional[SolveResult] = None
    covariance: Optional[CovarianceEstimate] = None
    outputs: Dict[str, str] = field(default_factory=dict)
    extra: Dict[str, Any] = field(default_factory=dict)
    include_timing: bool = True

    @property
    def status(self) -> str:
        if self.result is not None:
            return self.result.termination.value
        return "ok"


def spectral_norm(Sigma: np.ndarray) -> float:
    if not Sigma.size:
        return 0.0
    return float(np.linalg.norm(Sigma, 2))


class ReportGenerator:
    """Render run and validation reports as JSON, HTML or plain text."""

    def __init__(self) -> None:
        template_path = Path(__file__).parent.parent / "templates"
        self.template_env: jinja2.Environment = jinja2.Environment(
            loader=jinja2.FileSystemLoader(str(template_path)),
            autoescape=True,
        )

    def generate_report(self, report: RunReport, output_format: str = "json") -> str:
        data = self.report_data(report)
        if output_format == "json":
            return json.dumps(data, indent=2) + "\n"
        if output_format == "html":
            return self._render_html(data)
        if output_format == "text":
            return self._render_text(data)
        raise ValueError(f"Unsupported output format: {output_format}")

    def report_data(self, report: RunReport) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "command": report.command,
            "status": report.status,
            "problem_file": report.problem_file,
            "config": report.config,
        }
        if report.include_timing:
            data["timestamp"] = datetime.now().isoformat()
        if report.result is not None:
            data["solve"] = self._result_data(report.result, report.include_timing)
        if report.covariance is not None:
            data["covariance"] = self._covariance_data(report.covariance)
        data.update(report.extra)
        data["outputs"] = dict(report.outputs)
        return data

    def _result_data(self, result: SolveResult, include_timing: bool) -> Dict[str, Any]:
        final = result.final
        return {
            "termination": result.termination.value,
            "sweeps": result.sweeps,
            "alpha": result.alpha,
            "L": _num(final.L),
            "Ghat": _num(final.Ghat),
            "G": _num(final.G),
            "epsilon_bound": _num(result.epsilon_bound),
            "heuristic_mode": result.heuristic_mode,
            "threads": result.threads,
            "diagnostics": list(result.diagnostics),
            "elapsed_s": final.elapsed_s if include_timing else 0.0,
            "x_hat": [float(v) for v in result.x_hat],
        }

    def _covariance_data(self, cov: CovarianceEstimate) -> Dict[str, Any]:
        return {
            "method": cov.method,
            "block": cov.block,
            "N_S": cov.n_samples,
            "spectral_norm": spectral_norm(cov.Sigma),
            "effective_weight_sum": _num(cov.effective_weight_sum),
            "raw_asymmetry": cov.raw_asymmetry,
            "Sigma": cov.Sigma.tolist(),
        }

    def _render_html(self, data: Dict[str, Any]) -> str:
        try:
            template = self.template_env.get_template("report.html")
            return template.render(report=data)
        except jinja2.TemplateNotFound:
            raise RuntimeError(
                "HTML template not found. Ensure report.html exists in the "
                "templates directory."
            )

    def _render_text(self, data: Dict[str, Any]) -> str:
        lines = [f"{data['command']}: {data['status']}"]
        if data.get("problem_file"):
            lines.append(f"problem: {data['problem_file']}")
        solve = data.get("solve")
        if solve:
            lines.append(
                f"sweeps: {solve['sweeps']}  L: {solve['L']}  G: {solve['G']}"
            )
            if solve["epsilon_bound"] is not None:
                lines.append(f"suboptimality bound: {solve['epsilon_bound']}")
            if solve["heuristic_mode"]:
                lines.append("heuristic mode: non-GND factors present")
            lines.extend(f"diagnostic: {d}" for d in solve["diagnostics"])
        cov = data.get("covariance")
        if cov:
            lines.append(
                f"covariance ({cov['method']}, block {cov['block']}, "
                f"N_S={cov['N_S']}): ||Sigma|| = {cov['spectral_norm']}"
            )
        for name, path in data.get("outputs", {}).items():
            lines.append(f"{name}: {path}")
        return "\n".join(lines) + "\n"

    def validation_report(
        self, result: ValidationResult, output_format: str = "text"
    ) -> str:
        violations = [
            {
                "check_id": v.check_id,
                "severity": v.severity,
                "location": v.location,
                "description": v.description,
                "suggested_fix": v.suggested_fix,
            }
            for v in result.violations
        ]
        if output_format == "json":
            return json.dumps(
                {
                    "ok": result.ok,
                    "elements_checked": result.elements_checked,
                    "violations": violations,
                },
                indent=2,
            ) + "\n"
        if output_format != "text":
            raise ValueError(f"Unsupported output format: {output_format}")
        lines = ["model is valid" if result.ok else "model is invalid"]
        for v in violations:
            line = f"[{v['severity']}] {v['location']}: {v['description']}"
            if v["suggested_fix"]:
                line += f" ({v['suggested_fix']})"
            lines.append(line)
        return "\n".join(lines) + "\n"


def write_trace_csv(
    path: Union[str, Path], trace: Sequence[SweepRecord], include_timing: bool = True
) -> None:
    """One row per completed sweep."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for rec in trace:
            if rec.sweep == 0:
                continue
            writer.writerow(
                [
                    rec.sweep,
                    _fmt(rec.L),
                    _fmt(rec.Ghat),
                    _fmt(rec.G),
                    _fmt(rec.max_block_delta),
                    _fmt(rec.elapsed_s if include_timing else 0.0),
                ]
            )


def write_matrix_csv(path: Union[str, Path], matrix: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        for row in np.atleast_2d(matrix):
            writer.writerow([_fmt(v) for v in row])


def read_matrix_csv(path: Union[str, Path]) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as f:
        rows = [[float(v) for v in row] for row in csv.reader(f) if row]
    return np.asarray(rows, dtype=float)


def write_curve_csv(
    path: Union[str, Path], header: Sequence[str], rows: Sequence[Sequence[float]]
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow(
                [_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row]
            )


def write_json(path: Union[str, Path], data: Dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def read_solution(path: Union[str, Path]) -> List[float]:
    """x_hat from a solve report (or any JSON with ``x_hat`` at the top)."""
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    if "solve" in data:
        data = data["solve"]
    if "x_hat" not in data:
        raise ValueError(f"{path}: no x_hat found")
    return [float(v) for v in data["x_hat"]]
