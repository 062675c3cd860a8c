def ratio(done, total):
    share = done / total
    return round(share, 2)
