"""
CSV reading and writing for review datasets and base-model prediction files.

All files are UTF-8, comma-delimited, with a header row. Labels are written in uppercase and read
case-insensitively.
"""
from pathlib import Path
from typing import List, Optional, Sequence, Union

import pandas as pd

from src.data.dataset import LabeledExample, rating_to_label
from src.models.ensemble.labels import PredictionRecord, SentimentLabel
from src.utils.errors import DataFormatError, InvalidArgumentError
from src.utils.logging_config import get_logger

logger = get_logger()

PathLike = Union[str, Path]

REVIEW_COLUMNS = ["example_id", "review_headline", "review_text", "rating"]
PREDICTION_COLUMNS = ["example_id", "model_id", "label"]
PROBABILITY_COLUMNS = ["p_positive", "p_negative", "p_neutral"]

# data rows start on line 2, after the header
_FIRST_ROW = 2


def _read_csv(path: PathLike, required: Sequence[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataFormatError(f"cannot parse {path}: {e}") from e

    frame.columns = [str(column).strip() for column in frame.columns]
    missing = [column for column in required if column not in frame.columns]
    if missing:
        raise DataFormatError(f"{path} is missing column(s) {', '.join(missing)}", row=1)
    return frame


def _write_csv(frame: pd.DataFrame, path: PathLike) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")


def _join_text(headline: str, body: str) -> str:
    return " ".join(part for part in (headline.strip(), body.strip()) if part)


def _parse_rating(value: str, row: int) -> Optional[int]:
    value = value.strip()
    if not value:
        return None
    try:
        rating = int(value)
        rating_to_label(rating)
    except (ValueError, InvalidArgumentError):
        raise DataFormatError(f"invalid rating {value!r}", row=row) from None
    return rating


def load_reviews(path: PathLike) -> List[LabeledExample]:
    """
    Read a review dataset.

    Columns: example_id, review_headline, review_text, rating and an optional label. When the
    label is absent it is derived from the rating.

    Args:
        path: CSV file

    Returns:
        Examples in file order
    """
    frame = _read_csv(path, REVIEW_COLUMNS)
    has_label = "label" in frame.columns
    examples: List[LabeledExample] = []
    seen = set()

    for offset, record in enumerate(frame.to_dict(orient="records")):
        row = offset + _FIRST_ROW
        example_id = record["example_id"].strip()
        if not example_id:
            raise DataFormatError("empty example_id", row=row)
        if example_id in seen:
            raise DataFormatError(f"duplicate example_id {example_id}", row=row)
        seen.add(example_id)

        rating = _parse_rating(record["rating"], row)
        raw_label = record["label"].strip() if has_label else ""
        try:
            if raw_label:
                label = SentimentLabel.parse(raw_label)
            elif rating is not None:
                label = rating_to_label(rating)
            else:
                raise DataFormatError("neither label nor rating given", row=row)
            examples.append(LabeledExample(
                example_id=example_id,
                text=_join_text(record["review_headline"], record["review_text"]),
                label=label,
                rating=rating,
            ))
        except InvalidArgumentError as e:
            raise DataFormatError(str(e), row=row) from e

    logger.info(f"Loaded {len(examples)} examples from {path}")
    return examples


def write_examples(examples: Sequence[LabeledExample], path: PathLike) -> None:
    """Write examples back in the review schema; the joined text goes to review_text."""
    frame = pd.DataFrame(
        [[e.example_id, "", e.text, "" if e.rating is None else str(e.rating), e.label.name]
         for e in examples],
        columns=REVIEW_COLUMNS + ["label"],
    )
    _write_csv(frame, path)
    logger.debug(f"Wrote {len(examples)} examples to {path}")


def load_predictions(path: PathLike) -> List[PredictionRecord]:
    """
    Read a base-model prediction file: example_id, model_id, label and optionally
    p_positive, p_negative, p_neutral.
    """
    frame = _read_csv(path, PREDICTION_COLUMNS)
    with_probabilities = all(column in frame.columns for column in PROBABILITY_COLUMNS)
    records: List[PredictionRecord] = []

    for offset, record in enumerate(frame.to_dict(orient="records")):
        row = offset + _FIRST_ROW
        example_id = record["example_id"].strip()
        model_id = record["model_id"].strip()
        if not example_id or not model_id:
            raise DataFormatError("empty example_id or model_id", row=row)
        try:
            label = SentimentLabel.parse(record["label"])
        except InvalidArgumentError as e:
            raise DataFormatError(str(e), row=row) from e

        probabilities = None
        if with_probabilities and any(record[c].strip() for c in PROBABILITY_COLUMNS):
            try:
                probabilities = tuple(float(record[c]) for c in PROBABILITY_COLUMNS)
            except ValueError:
                raise DataFormatError("invalid probability value", row=row) from None
        records.append(PredictionRecord(example_id, model_id, label, probabilities))

    logger.info(f"Loaded {len(records)} predictions from {path}")
    return records


def write_predictions(records: Sequence[PredictionRecord], path: PathLike) -> None:
    """Write predictions; probability columns are added when any record carries them."""
    with_probabilities = any(r.probabilities is not None for r in records)
    columns = PREDICTION_COLUMNS + (PROBABILITY_COLUMNS if with_probabilities else [])
    rows = []
    for r in records:
        row = [r.example_id, r.model_id, r.label.name]
        if with_probabilities:
            row += [repr(p) for p in r.probabilities] if r.probabilities else ["", "", ""]
        rows.append(row)
    _write_csv(pd.DataFrame(rows, columns=columns), path)
    logger.debug(f"Wrote {len(records)} predictions to {path}")
