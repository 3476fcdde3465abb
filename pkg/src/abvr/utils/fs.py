import hashlib
from pathlib import Path
from typing import List, Union


def file_digest(path: Union[str, Path]) -> str:
    """SHA-256 содержимого файла"""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def list_csv_files(directory: Union[str, Path]) -> List[Path]:
    """CSV-файлы директории в порядке имен"""
    return sorted(p for p in Path(directory).iterdir() if p.is_file() and p.suffix == ".csv")


def ensure_dir(path: Path) -> Path:
    """Создание директории если её нет"""
    path.mkdir(parents=True, exist_ok=True)
    return path
