def swap_ends(t):
    a, b = t
    xs = [b, a, 0]
    pair = (xs[0], xs[2])
    return pair
