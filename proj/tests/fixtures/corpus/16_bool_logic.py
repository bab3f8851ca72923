def in_window(x, lo, hi):
    inside = lo <= x <= hi
    edge = x == lo or x == hi
    return inside and not edge
