"""Report label taxonomy.

Every death report ends up in exactly one of three classes:

* ``real`` -- the person actually died at (or within a day of) the
  reported time.
* ``commemoration`` -- the person died in the past and the burst of
  mentions marks an anniversary or memorial.
* ``fake`` -- the person was alive at the time of the report (or no
  death is known at all): a hoax.

``LABELS`` fixes the canonical ordering used everywhere a stable order
matters (class-model concatenation, classifier tie-breaking, confusion
matrices, export summaries).
"""

from __future__ import annotations

REAL = "real"
COMMEMORATION = "commemoration"
FAKE = "fake"

LABELS: tuple[str, str, str] = (REAL, COMMEMORATION, FAKE)

LABEL_TO_INDEX: dict[str, int] = {name: i for i, name in enumerate(LABELS)}


def is_label(value: str) -> bool:
    return value in LABEL_TO_INDEX


def label_index(value: str) -> int:
    """Map a label name to its canonical index.

    Raises:
        ValueError: if ``value`` is not one of the three labels.
    """
    try:
        return LABEL_TO_INDEX[value]
    except KeyError:
        raise ValueError(f"unknown label: {value!r}") from None
