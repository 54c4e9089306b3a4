"""Score predictions against annotator answer sets with the consensus rule.

A prediction earns min(matches / 3, 1): three agreeing annotators mean
full credit, fewer give partial credit in thirds.  Shows the quantized
scores, what answer normalization forgives, and per-type aggregation.
"""

import json
import tempfile
from pathlib import Path

from basiq.vqa_metric import (
    AnswerRecord,
    aggregate_by_type,
    evaluate,
    load_answer_records,
    question_score,
)

ten = ["blue"] * 10
records = [
    AnswerRecord("q1", "blue", tuple(ten)),                      # 10 of 10 agree
    AnswerRecord("q2", "blue", ("blue", "blue") + ("red",) * 8), # 2 of 10
    AnswerRecord("q3", "blue", ("blue",) + ("red",) * 9),        # 1 of 10
    AnswerRecord("q4", "blue", ("red",) * 10),                   # nobody
]
for rec in records:
    print(f"{rec.question_id}: predicted {rec.predicted!r} -> "
          f"score {question_score(rec):.4f}")

report = evaluate(records)
print(f"\nmean accuracy over {report.n} questions: {report.mean:.6f}")

# Normalization forgives case and stray whitespace, raw matching does not.
messy = AnswerRecord("q5", "  Navy   Blue ", ("navy blue",) * 3)
print(f"\nnormalized score: {question_score(messy):.4f}, "
      f"raw score: {question_score(messy, normalize=False):.4f}")

# Per-type aggregation; unmapped questions fall into "other".
type_map = {"q1": "color", "q2": "color", "q3": "count"}
for label, entry in aggregate_by_type(report, type_map).items():
    print(f"{label}: mean {entry['mean']:.4f} over {entry['n']}")

# The same computation from prediction and annotation files.
with tempfile.TemporaryDirectory() as tmp:
    pred_path = Path(tmp) / "predictions.jsonl"
    anno_path = Path(tmp) / "annotations.jsonl"
    pred_path.write_text(
        "".join(json.dumps({"question_id": r.question_id, "answer": r.predicted}) + "\n"
                for r in records),
        encoding="utf-8",
    )
    anno_path.write_text(
        "".join(json.dumps({"question_id": r.question_id,
                            "answers": list(r.annotator_answers)}) + "\n"
                for r in records),
        encoding="utf-8",
    )
    loaded = load_answer_records(pred_path, anno_path)
    file_report = evaluate(loaded)
    print(f"\nfrom files: mean {file_report.mean:.6f} "
          f"(matches in-memory: {file_report.mean == report.mean})")
