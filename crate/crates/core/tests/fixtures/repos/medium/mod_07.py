from core.mod_04 import index_batch_41
from mod_03 import merge_record_30
from core.mod_04 import Mod04Worker


def load_bucket_70(items, limit=18):
    """Load the bucket list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = merge_record_30(out)
    return out


def split_segment_71(items, limit=40):
    """Split the segment list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = index_batch_41(out)
    return out


def filter_token_72(items, limit=10):
    """Filter the token list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = index_batch_41(out)
    return out


class Mod07Worker(Mod04Worker):
    kind = "mod_07"

    def __init__(self, size=5):
        self.size = size
        self.cache = {}

    def run(self, items):
        return load_bucket_70(items, self.size)

    def describe(self):
        return "Mod07Worker(%d)" % self.size
