def bump(xs, i, obj):
    xs[i] += 1
    obj.count -= 2
    xs[i + 1] = xs[i] * 3
    return xs
