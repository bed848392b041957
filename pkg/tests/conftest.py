import numpy as np
import pytest
from PIL import Image


SKIN_RGB = (229, 194, 152)
DARK_SKIN_RGB = (141, 85, 36)


def write_png(path, rgb, size=(8, 8)):
    arr = np.full((size[1], size[0], 3), rgb, dtype=np.uint8)
    Image.fromarray(arr).save(path)


@pytest.fixture
def dataset_dir(tmp_path):
    """Six-image dataset: manifest + PNG files, three images gold-seeded."""
    rows = [
        ("im0", SKIN_RGB, "2", "2", "3"),
        ("im1", DARK_SKIN_RGB, "5", "5", ""),
        ("im2", SKIN_RGB, "3", "", ""),
        ("im3", SKIN_RGB, "", "", ""),
        ("im4", (0, 255, 0), "", "", ""),
        ("im5", DARK_SKIN_RGB, "", "", ""),
    ]
    lines = ["image_id,file_path,source,expert1,expert2,expert3"]
    for image_id, rgb, e1, e2, e3 in rows:
        write_png(tmp_path / f"{image_id}.png", rgb)
        lines.append(f"{image_id},{image_id}.png,textbook,{e1},{e2},{e3}")
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n")
    return tmp_path
