def square(x):
    return x * x

def sum_of_squares(a, b):
    return square(a) + square(b)
