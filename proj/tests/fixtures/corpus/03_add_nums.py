def add_nums(a, b):
    return a+b
