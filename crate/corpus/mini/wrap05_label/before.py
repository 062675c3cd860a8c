def show(count):
    label = 'items: ' + count
    print(label)
