# Scales every value by the given factor.

def scale_all(values, factor):
    out = []

    # grow the output one value at a time
    for v in values:
        out.append(v * factor)  # scaled copy

    return out
