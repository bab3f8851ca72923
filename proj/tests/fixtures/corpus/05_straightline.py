def total_cost(price, qty):
    subtotal = price * qty
    tax = subtotal * 0.07
    shipping = 4.99
    return subtotal + tax + shipping
