def ratio(done, total):
    share = float(done) / total
    return round(share, 2)
