import json
import logging
import os
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from services.reporting import to_jsonable

RULE = "-" * 72


class ProcessLogger:
    """
    Record of one CLI run.

    `detailed_logs/<run>_<stamp>.log` is the human-readable trail and
    `json_logs/<run>_<stamp>.json` the machine-readable one; the JSON file is
    rewritten after every step so an interrupted run still leaves a record.
    """

    def __init__(self, run_name: str, base_dir: str = "correlation_run_logs", parameters: Optional[Dict[str, Any]] = None):
        self.run_name = run_name
        root = Path(base_dir)
        self.detailed_logs_dir = root / "detailed_logs"
        self.json_logs_dir = root / "json_logs"
        for directory in (self.detailed_logs_dir, self.json_logs_dir):
            directory.mkdir(parents=True, exist_ok=True)

        stem = f"{run_name}_{datetime.now().strftime('%Y%m%d_%H%M%S_%f')}"
        self.detailed_log_file = self.detailed_logs_dir / f"{stem}.log"
        self.json_log_file = self.json_logs_dir / f"{stem}.json"
        self._handler = logging.FileHandler(self.detailed_log_file, encoding='utf-8')
        self._handler.setFormatter(logging.Formatter('%(asctime)s [%(levelname)s] %(run)s: %(message)s\n%(body)s'))
        self.logger = logging.getLogger(f"correlation_run.{stem}")
        self.logger.setLevel(logging.INFO)
        self.logger.propagate = False
        self.logger.addHandler(self._handler)

        self._started = time.perf_counter()
        self.record: Dict[str, Any] = {
            'run': run_name,
            'pid': os.getpid(),
            'start_time': datetime.now().isoformat(),
            'parameters': to_jsonable(parameters or {}),
            'steps': [],
            'warnings': [],
            'completion_status': None,
            'process_duration': None,
        }
        self._write()

    def _elapsed(self) -> float:
        return round(time.perf_counter() - self._started, 6)

    def _emit(self, level: int, message: str, details: Any):
        body = f"{json.dumps(details, indent=2)}\n{RULE}" if details else RULE
        self.logger.log(level, message, extra={'run': self.run_name, 'body': body})

    def log_step(self, step: str, details: Dict[str, Any] = None):
        details = to_jsonable(details or {})
        self._emit(logging.INFO, step, details)
        self.record['steps'].append({'step': step, 'elapsed_seconds': self._elapsed(), 'details': details})
        self._write()

    def log_warning(self, message: str):
        self._emit(logging.WARNING, message, None)
        self.record['warnings'].append({'message': message, 'elapsed_seconds': self._elapsed()})
        self._write()

    def finalize_process(self, final_status: str, summary: Dict[str, Any] = None):
        """Close the run: status, duration and summary go into both logs."""
        self.record['completion_status'] = final_status
        self.record['end_time'] = datetime.now().isoformat()
        self.record['process_duration'] = self._elapsed()
        if summary:
            self.record['summary'] = to_jsonable(summary)
        self.log_step("Run Completed", {'final_status': final_status, 'duration_seconds': self.record['process_duration']})
        self.logger.removeHandler(self._handler)
        self._handler.close()

    @property
    def step_names(self) -> List[str]:
        return [entry['step'] for entry in self.record['steps']]

    def _write(self):
        tmp = self.json_log_file.with_suffix('.json.tmp')
        tmp.write_text(json.dumps(self.record, indent=2, ensure_ascii=False), encoding='utf-8')
        tmp.replace(self.json_log_file)

    @staticmethod
    def load_process_log(json_file_path) -> Dict[str, Any]:
        with open(json_file_path, 'r', encoding='utf-8') as f:
            return json.load(f)
