def sum_squares(nums):
    total = 0
    for x in nums:
        total += x * x
    return total
