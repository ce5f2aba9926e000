"""
File utility functions for spectrum_ledger.

Reading scenario files with encoding detection and writing run outputs
(event logs, state documents, generated scenarios).
"""

import chardet
from pathlib import Path
from typing import List, Optional, Union

from .logger import get_logger

logger = get_logger()


class FileUtils:
    """Utility class for file operations."""

    SCENARIO_EXTENSIONS = {'.scn'}

    @staticmethod
    def detect_encoding(file_path: Union[str, Path]) -> str:
        """
        Detect the encoding of a text file.

        Args:
            file_path: Path to the file

        Returns:
            Detected encoding (e.g., 'utf-8', 'ascii')
        """
        file_path = Path(file_path)

        if not file_path.exists():
            raise FileNotFoundError(f"File not found: {file_path}")

        with open(file_path, 'rb') as f:
            raw_data = f.read(10000)

        result = chardet.detect(raw_data)
        encoding = result['encoding']
        confidence = result['confidence'] or 0.0

        logger.debug(f"Detected encoding: {encoding} (confidence: {confidence:.2f})")

        return encoding or 'utf-8'

    @staticmethod
    def read_text_file(file_path: Union[str, Path], encoding: Optional[str] = None) -> str:
        """
        Read a text file, auto-detecting its encoding unless one is given.

        Falls back to UTF-8 when the detected encoding cannot decode the file.
        """
        file_path = Path(file_path)

        if not file_path.exists():
            raise FileNotFoundError(f"File not found: {file_path}")

        if encoding is None:
            encoding = FileUtils.detect_encoding(file_path)

        try:
            with open(file_path, 'r', encoding=encoding) as f:
                content = f.read()
            logger.debug(f"Successfully read file: {file_path}")
            return content
        except (UnicodeDecodeError, LookupError) as e:
            logger.warning(f"Failed to read with encoding {encoding}, trying UTF-8: {e}")
            with open(file_path, 'r', encoding='utf-8') as f:
                return f.read()

    @staticmethod
    def write_text_file(file_path: Union[str, Path], content: str) -> Path:
        """Write UTF-8 text with LF newlines, creating parent directories."""
        file_path = Path(file_path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(content)
        logger.debug(f"Wrote {len(content)} characters to {file_path}")
        return file_path

    @staticmethod
    def get_scenario_files(directory: Union[str, Path]) -> List[Path]:
        """List scenario files in a directory, sorted by name."""
        directory = Path(directory)

        if not directory.exists():
            logger.warning(f"Directory does not exist: {directory}")
            return []

        files = sorted(
            p for p in directory.iterdir()
            if p.is_file() and p.suffix.lower() in FileUtils.SCENARIO_EXTENSIONS
        )
        logger.debug(f"Found {len(files)} scenario files in {directory}")
        return files
