from mod_03 import merge_record_30
from plugins.mod_02 import store_token_20
from mod_03 import Mod03Worker


def score_frame_40(items, limit=45):
    """Score the frame list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = store_token_20(out)
    return out


def index_batch_41(items, limit=48):
    """Index the batch list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    return out


def decode_segment_42(items, limit=9):
    """Decode the segment list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = merge_record_30(out)
    return out


class Mod04Worker(Mod03Worker):
    kind = "mod_04"

    def __init__(self, size=1):
        self.size = size
        self.cache = {}

    def run(self, items):
        return score_frame_40(items, self.size)

    def describe(self):
        return "Mod04Worker(%d)" % self.size
