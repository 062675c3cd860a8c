def page_offset(page, size):
    page = parse(page)
    page = int(page)
    return page * size
