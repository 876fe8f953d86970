from api.mod_04 import load_segment_41
from engine.mod_06 import split_bucket_62
from engine.mod_06 import Mod06Worker


def render_token_70(items, limit=23):
    """Render the token list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = load_segment_41(out)
    return out


def merge_bucket_71(items, limit=32):
    """Merge the bucket list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    return out


def filter_column_72(items, limit=2):
    """Filter the column list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = load_segment_41(out)
    return out


class Mod07Worker(Mod06Worker):
    kind = "mod_07"

    def __init__(self, size=3):
        self.size = size
        self.cache = {}

    def run(self, items):
        return render_token_70(items, self.size)

    def describe(self):
        return "Mod07Worker(%d)" % self.size
