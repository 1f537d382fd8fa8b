import hashlib
import logging
from pathlib import Path
from typing import Tuple

from app.errors import PresentationParseError
from app.schemas.presentation_schema import Presentation
from app.services.words_service import parse_presentation

logger = logging.getLogger(__name__)


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def presentation_from_text(text: str) -> Tuple[Presentation, str]:
    return parse_presentation(text), content_hash(text)


def load_presentation(path: str) -> Tuple[Presentation, str]:
    """Parse a presentation file; returns the presentation and the sha256 of its content."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise PresentationParseError(f"Cannot read presentation file {path}: {e}")
    p, digest = presentation_from_text(text)
    logger.info(f"✅ Loaded presentation {path} ({p.rank} generators, {len(p.relators)} relators)")
    return p, digest
