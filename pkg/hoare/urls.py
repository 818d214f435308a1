from django.urls import path

from .views import AssertAPIView, CheckAPIView, ProveAPIView, WlpAPIView, WpAPIView

urlpatterns = [
    path('wp/', WpAPIView.as_view()),
    path('wlp/', WlpAPIView.as_view()),
    path('check/', CheckAPIView.as_view()),
    path('prove/', ProveAPIView.as_view()),
    path('assert/', AssertAPIView.as_view()),
]
