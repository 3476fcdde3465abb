"""A/B variance reduction: DIFF, CUPED, CUPAC и комбинированная оценка"""

__version__ = "0.1.0"
__author__ = "Артем Коваленко"
__email__ = "ar-kovale@yandex.ru"
