import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from application.dto.pipeline_dto import ReportDTO
from domain.exceptions.pipeline_exceptions import MissingArtifactError
from domain.exceptions.schedule_exceptions import ScheduleError
from domain.services.encoding_service import EncodingService, kind_token_indices
from domain.services.schedule_service import ScheduleService
from domain.value_objects.injection_schedule import InjectionOrder
from domain.value_objects.primitive_kind import PrimitiveKind
from infrastructure.config.pipeline_config import PipelineConfig
from infrastructure.encoders.encoder_bank import build_encoder_bank
from infrastructure.repositories.file_artifact_repository import FileArtifactRepository
from infrastructure.repositories.jsonl_trace_repository import JsonlTraceRepository
from infrastructure.serialization.errors import dump_json
from infrastructure.serialization.graph_codec import decode_graph_json
from infrastructure.serialization.schedule_codec import decode_schedule_json
from infrastructure.serialization.split_codec import decode_split_json
from infrastructure.serialization.tensor_codec import decode_tseq
from infrastructure.training.dataset import target_latent
from shared.constants import (
    CONFIG_FILE,
    GRAPH_FILE,
    INPUT_SEQUENCE_FILE,
    LATENT_FILE,
    PROBE_TRACE_DIR,
    REPORT_JSON_FILE,
    REPORT_TEXT_FILE,
    RUN_TRACE_DIR,
    SCHEDULE_FILE,
    SPLIT_FILE,
)
from shared.utils.seeding import derive_seed

logger = logging.getLogger(__name__)

ABLATION_AXES = ("injection", "order", "w")

# fractions of the run compared in the attention-mass summary
MASS_STAGES = {"early": 0.25, "late": 0.75}


def _floats(values) -> List[float]:
    return [float(v) for v in np.asarray(values, dtype=np.float64).ravel()]


def alignment_score(latent: np.ndarray, target: np.ndarray) -> float:
    """Cosine similarity between a generated latent and its synthetic target"""
    a = np.asarray(latent, dtype=np.float64).ravel()
    b = np.asarray(target, dtype=np.float64).ravel()
    denominator = np.linalg.norm(a) * np.linalg.norm(b)
    if denominator == 0.0:
        return 0.0
    return float(a @ b / denominator)


def axis_value(summary: Dict[str, Any], axis: str) -> str:
    return str(summary["labels"][axis])


class GenerateReportUseCase:
    """Plain-text and JSON report over one or more run directories"""

    def summarize_run(self, run_dir: Union[str, Path]) -> Dict[str, Any]:
        artifacts = FileArtifactRepository(run_dir)
        try:
            manifest = artifacts.load_manifest()
        except (json.JSONDecodeError, KeyError):
            raise MissingArtifactError(str(Path(run_dir) / "manifest.json"))

        config = PipelineConfig.model_validate_json(artifacts.read_bytes(CONFIG_FILE))
        schedule, _ = decode_schedule_json(artifacts.read_bytes(SCHEDULE_FILE))
        summary: Dict[str, Any] = {
            "run": Path(run_dir).name,
            "artifacts": len(manifest),
            "labels": {
                "injection": "on" if config.simulation.injection else "off",
                "order": str(InjectionOrder.parse(config.schedule.order)),
                "w": config.schedule.w,
            },
            "schedule": {**schedule.to_dict(), "steps": schedule.steps, "notes": list(schedule.notes)},
        }

        probe = JsonlTraceRepository(artifacts.root / PROBE_TRACE_DIR).load_all()
        if probe:
            summary["series"] = self._series(probe, schedule.s_attr, config)

        run = JsonlTraceRepository(artifacts.root / RUN_TRACE_DIR).load_all()
        if run or probe:
            summary["attention_mass"] = self._attention_mass(run or probe, artifacts, config)

        if artifacts.exists(LATENT_FILE):
            inputs = decode_tseq(artifacts.read_bytes(INPUT_SEQUENCE_FILE)).tokens
            latent = decode_tseq(artifacts.read_bytes(LATENT_FILE)).tokens
            target = target_latent(
                inputs, latent.shape[0], latent.shape[1], derive_seed(config.seed, "dataset")
            )
            summary["alignment"] = alignment_score(latent, target)
        return summary

    def _series(self, traces, s_attr: int, config: PipelineConfig) -> Dict[str, Any]:
        service = ScheduleService(config.schedule.to_domain())
        snr = service.mean_snr(traces)
        series: Dict[str, Any] = {
            "delta": _floats(service.aggregate_diffs(traces)),
            "snr": _floats(snr),
            "kappa": [],
            "kappa_argmax_step": None,
        }
        count = service.planning_span(snr.shape[0], s_attr)
        if count >= 3:
            x, y = service.curvature_axes(snr[:count])
            try:
                kappa = service.curvature_series(y, x)
            except ScheduleError as e:
                logger.warning("Curvature unavailable", extra={"error": e.message})
            else:
                series["kappa"] = _floats(kappa)
                series["kappa_argmax_step"] = int(np.argmax(kappa)) + 1
        return series

    def _attention_mass(
        self, traces, artifacts: FileArtifactRepository, config: PipelineConfig
    ) -> Dict[str, Dict[str, float]]:
        """Share of conditioning attention on each primitive kind's split-text tokens"""
        split = decode_split_json(artifacts.read_bytes(SPLIT_FILE))
        caption = decode_graph_json(artifacts.read_bytes(GRAPH_FILE)).caption
        bank = build_encoder_bank(
            d_l=config.encoder.d_l,
            d_g=config.encoder.d_g,
            d=config.encoder.d,
            max_len=config.encoder.max_len,
            seed=derive_seed(config.seed, "encoders"),
        )
        components = EncodingService(bank).input_components(split, caption)
        length = components.length
        keys = traces[0].steps[0].attn.shape[-1]
        if keys != 2 * length:
            logger.warning(
                "Trace key count does not match the input sequence",
                extra={"keys": keys, "expected": 2 * length},
            )
            return {}

        steps = traces[0].S
        mass: Dict[str, Dict[str, float]] = {}
        for stage, fraction in MASS_STAGES.items():
            step = int(round(fraction * (steps - 1)))
            per_key = np.mean([trace.steps[step].attn.mean(axis=(0, 1, 2)) for trace in traces], axis=0)
            row = {"step": float(step), "complete": float(per_key[:length].sum())}
            for kind in PrimitiveKind:
                indices = kind_token_indices(split, components.offsets, kind)
                row[kind.group_key] = float(per_key[[length + i for i in indices]].sum())
            mass[stage] = row
        return mass

    def ablation_tables(
        self,
        summaries: Sequence[Dict[str, Any]],
        axes: Optional[Dict[str, Sequence[Dict[str, Any]]]] = None,
    ) -> Dict[str, List[Dict[str, Any]]]:
        """One table per axis; by default every axis whose value differs across runs"""
        if axes is None:
            axes = {
                axis: summaries
                for axis in ABLATION_AXES
                if len({axis_value(s, axis) for s in summaries}) > 1
            }
        tables = {}
        for axis, rows in axes.items():
            keys = [axis_value(s, axis) for s in rows]
            tables[axis] = [
                {
                    "key": key if keys.count(key) == 1 else f"{key} ({s['run']})",
                    "run": s["run"],
                    "s_rel": s["schedule"]["s_rel"],
                    "s_attr": s["schedule"]["s_attr"],
                    "alignment": s.get("alignment"),
                }
                for key, s in zip(keys, rows)
            ]
        return tables

    def execute(
        self,
        run_dirs: Sequence[Union[str, Path]],
        output_dir: Optional[Union[str, Path]] = None,
        axes: Optional[Dict[str, Sequence[Union[str, Path]]]] = None,
    ) -> ReportDTO:
        if not run_dirs:
            raise MissingArtifactError("no run directory given")
        by_dir = {str(d): self.summarize_run(d) for d in run_dirs}
        summaries = list(by_dir.values())

        tables: Dict[str, List[Dict[str, Any]]] = {}
        if axes is not None:
            tables = self.ablation_tables(
                summaries, {axis: [by_dir[str(d)] for d in dirs] for axis, dirs in axes.items()}
            )
        elif len(summaries) > 1:
            tables = self.ablation_tables(summaries)

        document = {"runs": summaries, "tables": tables}
        report = ReportDTO(document=document, text=render_text(document))
        if output_dir is not None:
            artifacts = FileArtifactRepository(output_dir)
            artifacts.write_bytes(REPORT_JSON_FILE, dump_json(document))
            artifacts.write_bytes(REPORT_TEXT_FILE, report.text.encode("utf-8"))
        logger.info("Generated report", extra={"runs": len(summaries), "tables": len(tables)})
        return report


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def render_text(document: Dict[str, Any]) -> str:
    lines: List[str] = []
    for summary in document["runs"]:
        schedule = summary["schedule"]
        lines.append(f"== run {summary['run']} ==")
        lines.append(
            f"schedule: s_obj={schedule['s_obj']} s_rel={schedule['s_rel']} "
            f"s_attr={schedule['s_attr']} steps={schedule['steps']}"
        )
        for note in schedule["notes"]:
            lines.append(f"  note: {note}")
        labels = summary["labels"]
        lines.append(
            f"injection={labels['injection']} order={labels['order']} w={labels['w']}"
        )
        series = summary.get("series")
        if series:
            lines.append("delta: " + " ".join(_fmt(v) for v in series["delta"]))
            lines.append("snr: " + " ".join(_fmt(v) for v in series["snr"]))
            lines.append("kappa: " + " ".join(_fmt(v) for v in series["kappa"]))
            lines.append(f"kappa argmax step: {_fmt(series['kappa_argmax_step'])}")
        for stage, row in summary.get("attention_mass", {}).items():
            lines.append(
                f"attention mass ({stage}, step {int(row['step'])}): "
                + " ".join(f"{k}={_fmt(v)}" for k, v in row.items() if k != "step")
            )
        if "alignment" in summary:
            lines.append(f"alignment: {_fmt(summary['alignment'])}")
        lines.append("")

    for axis, rows in document["tables"].items():
        lines.append(f"== ablation: {axis} ==")
        lines.append(f"{axis:<16} {'s_rel':>6} {'s_attr':>6} {'alignment':>10}")
        for row in rows:
            lines.append(
                f"{row['key']:<16} {row['s_rel']:>6} {row['s_attr']:>6} "
                f"{_fmt(row['alignment']):>10}"
            )
        lines.append("")
    return "\n".join(lines)
