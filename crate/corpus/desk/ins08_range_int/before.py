def batches(total, size):
    for start in range(0, total, size):
        yield start
