def fruit_distribution(s, n):
    # Split the string into parts
    parts = s.split()
    # Extract apple count
    apple_count = int(parts[0])
    # Extract orange count
    orange_count = int(parts[2])
    # Calculate mango count
    mango_count = n - apple_count - orange_count
    return mango_count
