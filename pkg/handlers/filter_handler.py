# handlers/filter_handler.py
import logging
import os

from core.tensor import Tensor, no_tape
from data.pgm import write_mid_slices
from data.volume_io import load_volume, save_volume
from models.struct_element import StructElement
from models.volume import VolumeSample
from morphology.chm import chm_general
from morphology.flat import close_flat, dilate_flat, erode_flat, open_flat
from utils.constants import EXIT_OK
from utils.helpers import parse_window

logger = logging.getLogger(__name__)

FLAT = {"erode": erode_flat, "dilate": dilate_flat, "open": open_flat, "close": close_flat}


def apply_chm(op: str, image: Tensor, se: StructElement, order: float) -> Tensor:
    """CHM operator of magnitude |order|: erosion side uses -|order|, dilation side +|order|"""
    order = abs(order)
    if op == "erode":
        return chm_general(image, se, -order)
    if op == "dilate":
        return chm_general(image, se, order)
    if op == "open":
        return chm_general(chm_general(image, se, -order), se, order)
    return chm_general(chm_general(image, se, order), se, -order)


class FilterHandler:
    """Apply one morphological operator to every channel of a volume"""

    def handle(self, args) -> int:
        window = parse_window(args.window)
        sample = load_volume(args.input)
        image = Tensor(sample.batch())

        with no_tape():
            if args.impl == "flat":
                se = StructElement.flat(window)
                out = FLAT[args.op](image, se, method=args.method)
            else:
                se = StructElement.uniform(sample.channels, window)
                out = apply_chm(args.op, image, se, args.p)

        filtered = VolumeSample(image=out.data[0], label=sample.label, id=sample.id, num_classes=sample.num_classes)
        save_volume(args.out, filtered)
        logger.info(f"✅ {args.impl} {args.op} with window {window} written to {args.out}")

        if args.slice_pgm:
            stem = os.path.splitext(os.path.basename(args.out))[0]
            written = write_mid_slices(args.slice_pgm, stem, filtered.image)
            logger.info(f"🖼️ Wrote {len(written)} PGM sections to {args.slice_pgm}")
        print(f"{args.impl} {args.op} {window} -> {args.out}")
        return EXIT_OK
