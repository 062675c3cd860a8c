def batches(total, size):
    for start in range(0, int(total), size):
        yield start
