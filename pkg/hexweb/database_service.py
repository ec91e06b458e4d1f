import json
import logging
from datetime import datetime
from typing import Any, Dict, Iterable, List, Optional

from sqlalchemy import desc, func
from sqlalchemy.orm import Session

from .models import SAMPLE_KINDS, ExperimentRun, MeasurementSample

logger = logging.getLogger(__name__)


class DatabaseService:
    """Results store: experiment runs and their measured samples"""

    def __init__(self):
        self.logger = logging.getLogger("database_service")

    def record_run(
        self,
        db: Session,
        command: str,
        signature: str,
        seed: Optional[int],
        parameters: Dict[str, Any],
    ) -> ExperimentRun:
        try:
            run = ExperimentRun(
                command=command,
                signature=signature,
                seed=seed,
                parameters=json.dumps(parameters, sort_keys=True, default=str),
                status="running",
                created_at=datetime.utcnow(),
            )
            db.add(run)
            db.commit()
            db.refresh(run)
            self.logger.info(f"Run stored: ID {run.id} ({command} on {signature})")
            return run
        except Exception as e:
            db.rollback()
            self.logger.error(f"Error storing run: {str(e)}")
            raise Exception(f"Error storing run: {str(e)}")

    def record_samples(self, db: Session, run_id: int, kind: str, rows: Iterable[Dict[str, Any]]) -> int:
        """Store sample rows (``sample_id``, ``key_a``, ``key_b``, ``value``) of one kind"""
        if kind not in SAMPLE_KINDS:
            raise ValueError(f"Unknown sample kind {kind}")
        try:
            count = 0
            for row in rows:
                value = row.get("value", row.get("curve_crossings"))
                db.add(
                    MeasurementSample(
                        run_id=run_id,
                        kind=kind,
                        sample_id=int(row.get("sample_id", count)),
                        key_a=row.get("key_a", row.get("kind")),
                        key_b=row.get("key_b"),
                        value=None if value is None else float(value),
                    )
                )
                count += 1
            db.commit()
            self.logger.info(f"Stored {count} {kind} samples for run {run_id}")
            return count
        except Exception as e:
            db.rollback()
            self.logger.error(f"Error storing samples: {str(e)}")
            raise Exception(f"Error storing samples: {str(e)}")

    def finish_run(self, db: Session, run_id: int, status: str, summary: Dict[str, Any]) -> ExperimentRun:
        try:
            run = db.query(ExperimentRun).filter(ExperimentRun.id == run_id).first()
            if run is None:
                raise LookupError(f"Run {run_id} does not exist")
            run.status = status
            run.summary = json.dumps(summary, sort_keys=True, default=str)
            db.commit()
            db.refresh(run)
            self.logger.info(f"Run {run_id} finished: {status}")
            return run
        except Exception as e:
            db.rollback()
            self.logger.error(f"Error finishing run: {str(e)}")
            raise Exception(f"Error finishing run: {str(e)}")

    def _run_dict(self, run: ExperimentRun) -> Dict[str, Any]:
        return {
            "id": run.id,
            "command": run.command,
            "signature": run.signature,
            "seed": run.seed,
            "parameters": json.loads(run.parameters or "{}"),
            "status": run.status,
            "summary": json.loads(run.summary) if run.summary else None,
            "created_at": run.created_at.isoformat(),
            "sample_count": len(run.samples),
        }

    def get_run(self, db: Session, run_id: int) -> Optional[Dict[str, Any]]:
        try:
            run = db.query(ExperimentRun).filter(ExperimentRun.id == run_id).first()
            return self._run_dict(run) if run else None
        except Exception as e:
            self.logger.error(f"Error getting run: {str(e)}")
            raise Exception(f"Error getting run: {str(e)}")

    def list_runs(self, db: Session, limit: int = 10, command: Optional[str] = None) -> List[Dict[str, Any]]:
        try:
            query = db.query(ExperimentRun)
            if command:
                query = query.filter(ExperimentRun.command == command)
            runs = query.order_by(desc(ExperimentRun.created_at), desc(ExperimentRun.id)).limit(limit).all()
            return [self._run_dict(run) for run in runs]
        except Exception as e:
            self.logger.error(f"Error listing runs: {str(e)}")
            raise Exception(f"Error listing runs: {str(e)}")

    def get_statistics(self, db: Session) -> Dict[str, Any]:
        """Run counts and, per sample kind, count and largest value"""
        try:
            total_runs = db.query(ExperimentRun).count()
            failed_runs = db.query(ExperimentRun).filter(ExperimentRun.status == "failed").count()
            per_kind = (
                db.query(MeasurementSample.kind, func.count(MeasurementSample.id), func.max(MeasurementSample.value))
                .group_by(MeasurementSample.kind)
                .all()
            )
            latest = db.query(ExperimentRun.created_at).order_by(desc(ExperimentRun.created_at)).first()
            return {
                "total_runs": total_runs,
                "failed_runs": failed_runs,
                "samples": {kind: {"count": count, "max": maximum} for kind, count, maximum in per_kind},
                "latest_run": latest[0].isoformat() if latest else None,
            }
        except Exception as e:
            self.logger.error(f"Error getting statistics: {str(e)}")
            raise Exception(f"Error getting statistics: {str(e)}")
